#pragma once

#include <atomic>
#include <cstdint>

#include "bigatomic/cached_waitfree.hpp"
#include "bigatomic/hazard.hpp"
#include "bigatomic/hooks.hpp"
#include "bigatomic/node_stats.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic {

// Value held by the central cell: the payload plus one word packing a
// sequence number (upper 63 bits) and the pending-write mark (low bit).
template <word_copyable T>
struct sequenced {
  T value;
  std::uint64_t seq_mark;

  std::uint64_t seq() const noexcept { return seq_mark >> 1; }
  unsigned mark() const noexcept { return seq_mark & 1; }
  static sequenced make(const T& v, std::uint64_t seq, unsigned mark) noexcept {
    return {v, (seq << 1) | (mark & 1)};
  }
};

// Wait-free Load/Store/CAS big atomic layered on a Load/CAS cell.
//
// Z holds (value, seq, mark). Stores go through the write buffer W, a
// marked pointer to a node with the buffered value; W's mark differing
// from Z's means a write is pending. Every updater helps transfer a
// pending write into Z, and a transfer bumps seq and flips Z's mark.
template <word_copyable T, class Hooks = no_hooks>
class writable {
 public:
  using value_type = T;
  using triple = sequenced<T>;
  using central = cached_waitfree<triple, Hooks>;
  static constexpr progress progress_guarantee = progress::wait_free;
  static constexpr bool supports_store = true;
  static constexpr const char* name = "writable";

  struct alignas(8) node : counted_node<node> {
    explicit node(const T& v) : value(v) {}
    const T value;
  };

  writable() : writable(T{}) {}
  explicit writable(const T& initial)
      : z_(triple::make(initial, 0, 0)), w_(marked_ptr::word(new node(initial))) {}
  writable(const writable&) = delete;
  writable& operator=(const writable&) = delete;
  ~writable() { delete marked_ptr::ptr<node>(w_.load()); }

  T load() { return z_.load().value; }

  void store(const T& desired) {
    {
      hazard_guard h;
      std::uintptr_t w = h.protect<Hooks>(w_, strip);
      const triple z = z_.load();
      if (bitwise_equal(z.value, desired)) return;
      if (z.mark() == mark_of(w)) {
        const std::uintptr_t fresh =
            marked_ptr::word(new node(desired)) | (1u - z.mark());
        Hooks::at("wr.store.install");
        if (w_.compare_exchange_strong(w, fresh)) {
          hazard_domain::instance().retire(marked_ptr::ptr<node>(w));
        } else {
          Hooks::at("wr.store.install_lost");
          delete marked_ptr::ptr<node>(fresh);
        }
      }
    }
    Hooks::at("wr.store.help");
    if (!help_write()) {
      Hooks::at("wr.store.help_again");
      help_write();
    }
  }

  bool cas(const T& expected, const T& desired) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const triple z = z_.load();
      if (!bitwise_equal(z.value, expected)) return false;
      if (bitwise_equal(expected, desired)) return true;
      help_write();
      Hooks::at("wr.cas.z_cas");
      if (z_.cas(z, triple::make(desired, z.seq() + 1, z.mark()))) return true;
    }
    Hooks::at("wr.cas.failed_twice");
    return false;
  }

  struct debug_state {
    typename central::debug_state z;
    triple z_value;
    unsigned w_mark;
    T w_value;
    std::uintptr_t w_word;
  };
  debug_state inspect() const {
    const std::uintptr_t w = w_.load();
    auto zs = z_.inspect();
    return {zs, zs.backup_value, mark_of(w), marked_ptr::ptr<node>(w)->value, w};
  }
  const central& z() const noexcept { return z_; }

 private:
  static unsigned mark_of(std::uintptr_t w) noexcept { return marked_ptr::is_marked(w) ? 1 : 0; }
  static const void* strip(std::uintptr_t w) noexcept {
    return reinterpret_cast<const void*>(marked_ptr::unmark(w));
  }

  // Transfers a pending write from W into Z. Returns false only when Z
  // changed under us, which a pending write survives at most once.
  bool help_write() {
    const triple z = z_.load();
    hazard_guard h;
    const std::uintptr_t w = h.protect<Hooks>(w_, strip);
    Hooks::at("wr.help.compare");
    if (z.mark() == mark_of(w)) return true;
    Hooks::at("wr.help.transfer");
    Hooks::steps(words_of<T>);
    const bool ok =
        z_.cas(z, triple::make(marked_ptr::ptr<node>(w)->value, z.seq() + 1, mark_of(w)));
    if (!ok) Hooks::at("wr.help.failed");
    return ok;
  }

  central z_;
  std::atomic<std::uintptr_t> w_;
};

}  // namespace bigatomic
