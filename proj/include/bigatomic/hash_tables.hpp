#pragma once

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <new>
#include <optional>
#include <type_traits>
#include <vector>

#if defined(__linux__)
#include <sys/mman.h>
#endif

#include "bigatomic/epoch.hpp"
#include "bigatomic/node_stats.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic {

// Fibonacci hashing of a 64-bit key onto a power-of-two table.
class bucket_hasher {
 public:
  explicit bucket_hasher(std::size_t size) noexcept
      : bits_(static_cast<unsigned>(std::countr_zero(size))) {}
  std::size_t operator()(std::uint64_t key) const noexcept {
    if (bits_ == 0) return 0;
    return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ull) >> (64 - bits_));
  }

 private:
  unsigned bits_;
};

inline std::size_t table_size_for(std::size_t n) noexcept {
  return std::bit_ceil(n < 1 ? std::size_t{1} : n);
}

// Heap chain link; immutable once published.
struct chain_node : counted_node<chain_node> {
  chain_node(std::uint64_t k, std::uint64_t v, std::uint64_t n) noexcept
      : key(k), value(v), next(n) {}
  const std::uint64_t key;
  const std::uint64_t value;
  const std::uint64_t next;  // chain_node* or 0
};

// First link of a chain, stored inline in a bucket. next is a chain_node
// pointer, kNull for a chain of length one, or kEmpty for no chain.
struct hash_link {
  static constexpr std::uint64_t kNull = 0;
  static constexpr std::uint64_t kEmpty = 2;

  std::uint64_t key;
  std::uint64_t value;
  std::uint64_t next;

  static constexpr hash_link empty() noexcept { return {0, 0, kEmpty}; }
  bool is_empty() const noexcept { return next == kEmpty; }
};
static_assert(words_of<hash_link> == 3);

namespace detail {

inline const chain_node* as_chain(std::uint64_t w) noexcept {
  return reinterpret_cast<const chain_node*>(static_cast<std::uintptr_t>(w));
}
inline std::uint64_t chain_word(const chain_node* n) noexcept {
  return static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(n));
}
inline void retire_chain(const chain_node* n) {
  epoch_domain::instance().retire(const_cast<chain_node*>(n));
}
inline void free_chain(std::uint64_t w) noexcept {
  while (const chain_node* n = as_chain(w)) {
    w = n->next;
    delete n;
  }
}

// Copies the links strictly before victim (starting at first) so that the
// last copy points past victim. Returns the head word of the new prefix.
inline std::uint64_t copy_prefix(std::uint64_t first, const chain_node* victim,
                                 std::vector<const chain_node*>& originals,
                                 std::vector<chain_node*>& copies) {
  for (const chain_node* n = as_chain(first); n != victim; n = as_chain(n->next))
    originals.push_back(n);
  std::uint64_t tail = victim->next;
  for (std::size_t i = originals.size(); i-- > 0;) {
    auto* c = new chain_node(originals[i]->key, originals[i]->value, tail);
    copies.push_back(c);
    tail = chain_word(c);
  }
  return tail;
}

// Fixed-size array of default-constructed T. Large arrays are 2 MiB aligned
// and advised for huge pages, since random probes over a table of hundreds
// of megabytes otherwise pay a page walk on most accesses.
template <class T>
class bucket_array {
  static constexpr std::size_t kHuge = std::size_t{2} << 20;

 public:
  explicit bucket_array(std::size_t n) : n_(n) {
    std::size_t bytes = n * sizeof(T);
    const std::size_t align = bytes >= kHuge ? kHuge : alignof(std::max_align_t) * 4;
    bytes = (bytes + align - 1) / align * align;
    void* mem = std::aligned_alloc(align, bytes);
    if (!mem) throw std::bad_alloc();
#if defined(__linux__) && defined(MADV_HUGEPAGE)
    if (align == kHuge) ::madvise(mem, bytes, MADV_HUGEPAGE);
#endif
    data_ = static_cast<T*>(mem);
    for (std::size_t i = 0; i < n; ++i) new (data_ + i) T();
  }
  bucket_array(const bucket_array&) = delete;
  bucket_array& operator=(const bucket_array&) = delete;
  ~bucket_array() {
    for (std::size_t i = 0; i < n_; ++i) data_[i].~T();
    std::free(data_);
  }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

 private:
  std::size_t n_;
  T* data_;
};

}  // namespace detail

// Separate-chaining hash map from 64-bit keys to 64-bit values whose first
// link lives inside the bucket as a big atomic. Updates never modify a
// published link: inserts push a new head, deletes path-copy the prefix.
// No resizing; the table holds next_pow2(capacity) buckets.
template <class Cell>
class cache_hash {
  static_assert(std::is_same_v<typename Cell::value_type, hash_link>,
                "buckets must be big atomics over hash_link");

 public:
  using cell_type = Cell;
  static constexpr const char* name = "cachehash";

  explicit cache_hash(std::size_t capacity)
      : size_(table_size_for(capacity)),
        hash_(size_),
        buckets_(size_) {}
  cache_hash(const cache_hash&) = delete;
  cache_hash& operator=(const cache_hash&) = delete;
  ~cache_hash() {
    for (std::size_t i = 0; i < size_; ++i) {
      const hash_link l = buckets_[i].cell.load();
      if (!l.is_empty()) detail::free_chain(l.next);
    }
  }

  std::size_t bucket_count() const noexcept { return size_; }
  std::size_t bucket_index(std::uint64_t key) const noexcept { return hash_(key); }

  std::optional<std::uint64_t> find(std::uint64_t key) {
    epoch_guard g;
    const hash_link l = bucket(key).load();
    if (l.is_empty()) return std::nullopt;
    if (l.key == key) return l.value;
    for (auto* n = detail::as_chain(l.next); n; n = detail::as_chain(n->next))
      if (n->key == key) return n->value;
    return std::nullopt;
  }

  bool insert(std::uint64_t key, std::uint64_t value) {
    epoch_guard g;
    Cell& b = bucket(key);
    for (;;) {
      const hash_link l = b.load();
      if (contains(l, key)) return false;
      chain_node* moved = nullptr;
      hash_link fresh{key, value, hash_link::kNull};
      if (!l.is_empty()) {
        moved = new chain_node(l.key, l.value, l.next);
        fresh.next = detail::chain_word(moved);
      }
      if (b.cas(l, fresh)) return true;
      delete moved;
    }
  }

  bool erase(std::uint64_t key) {
    epoch_guard g;
    Cell& b = bucket(key);
    std::vector<const chain_node*> originals;
    std::vector<chain_node*> copies;
    for (;;) {
      const hash_link l = b.load();
      if (l.is_empty()) return false;
      if (l.key == key) {
        // The successor, if any, moves inline.
        const chain_node* succ = detail::as_chain(l.next);
        const hash_link fresh =
            succ ? hash_link{succ->key, succ->value, succ->next} : hash_link::empty();
        if (b.cas(l, fresh)) {
          if (succ) detail::retire_chain(succ);
          return true;
        }
        continue;
      }
      const chain_node* victim = detail::as_chain(l.next);
      while (victim && victim->key != key) victim = detail::as_chain(victim->next);
      if (!victim) return false;
      originals.clear();
      copies.clear();
      const std::uint64_t tail = detail::copy_prefix(l.next, victim, originals, copies);
      if (b.cas(l, hash_link{l.key, l.value, tail})) {
        detail::retire_chain(victim);
        for (auto* o : originals) detail::retire_chain(o);
        return true;
      }
      for (auto* c : copies) delete c;
    }
  }

  Cell& bucket_at(std::size_t i) noexcept { return buckets_[i].cell; }

 private:
  struct padded {
    padded() : cell(hash_link::empty()) {}
    Cell cell;
  };

  static bool contains(const hash_link& l, std::uint64_t key) noexcept {
    if (l.is_empty()) return false;
    if (l.key == key) return true;
    for (auto* n = detail::as_chain(l.next); n; n = detail::as_chain(n->next))
      if (n->key == key) return true;
    return false;
  }

  Cell& bucket(std::uint64_t key) noexcept { return buckets_[hash_(key)].cell; }

  std::size_t size_;
  bucket_hasher hash_;
  detail::bucket_array<padded> buckets_;
};

// Baseline: the same chain algorithm with every link on the heap and a
// single-word head pointer per bucket.
class chaining_hash {
 public:
  static constexpr const char* name = "chaining";

  explicit chaining_hash(std::size_t capacity)
      : size_(table_size_for(capacity)),
        hash_(size_),
        heads_(size_) {}
  chaining_hash(const chaining_hash&) = delete;
  chaining_hash& operator=(const chaining_hash&) = delete;
  ~chaining_hash() {
    for (std::size_t i = 0; i < size_; ++i) detail::free_chain(heads_[i].load());
  }

  std::size_t bucket_count() const noexcept { return size_; }
  std::size_t bucket_index(std::uint64_t key) const noexcept { return hash_(key); }

  std::optional<std::uint64_t> find(std::uint64_t key) {
    epoch_guard g;
    for (auto* n = detail::as_chain(head(key).load()); n; n = detail::as_chain(n->next))
      if (n->key == key) return n->value;
    return std::nullopt;
  }

  bool insert(std::uint64_t key, std::uint64_t value) {
    epoch_guard g;
    auto& h = head(key);
    for (;;) {
      std::uint64_t first = h.load();
      for (auto* n = detail::as_chain(first); n; n = detail::as_chain(n->next))
        if (n->key == key) return false;
      auto* fresh = new chain_node(key, value, first);
      if (h.compare_exchange_strong(first, detail::chain_word(fresh))) return true;
      delete fresh;
    }
  }

  bool erase(std::uint64_t key) {
    epoch_guard g;
    auto& h = head(key);
    std::vector<const chain_node*> originals;
    std::vector<chain_node*> copies;
    for (;;) {
      std::uint64_t first = h.load();
      const chain_node* victim = detail::as_chain(first);
      while (victim && victim->key != key) victim = detail::as_chain(victim->next);
      if (!victim) return false;
      originals.clear();
      copies.clear();
      const std::uint64_t fresh = detail::copy_prefix(first, victim, originals, copies);
      if (h.compare_exchange_strong(first, fresh)) {
        detail::retire_chain(victim);
        for (auto* o : originals) detail::retire_chain(o);
        return true;
      }
      for (auto* c : copies) delete c;
    }
  }

 private:
  std::atomic<std::uint64_t>& head(std::uint64_t key) noexcept { return heads_[hash_(key)]; }

  std::size_t size_;
  bucket_hasher hash_;
  detail::bucket_array<std::atomic<std::uint64_t>> heads_;
};

}  // namespace bigatomic
