#pragma once

#include <atomic>
#include <cstdint>

#include "bigatomic/hazard.hpp"
#include "bigatomic/hooks.hpp"
#include "bigatomic/node_slab.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic {

// Backup word that is either an 8-aligned node pointer or a tagged null
// carrying the sequence-lock version that published the cache.
struct tagged_word {
  static constexpr std::uintptr_t kTag = 1;
  static bool is_null(std::uintptr_t w) noexcept { return w & kTag; }
  static std::uintptr_t null_for(std::uint64_t version) noexcept {
    return (static_cast<std::uintptr_t>(version) << 1) | kTag;
  }
  static std::uint64_t version_of(std::uintptr_t w) noexcept { return w >> 1; }
};

// Lock-free Load/CAS/Store big atomic that keeps a backup node installed
// only while an update is in flight.
//
// Either the backup holds a node with the live value, or it is a tagged
// null and the inline cache holds the live value. Updates install a node,
// then copy it into the cache under the sequence lock and swap the backup
// back to a tagged null; a writer overwritten before it uninstalls helps
// cache its successor's value instead.
template <word_copyable T, class Hooks = no_hooks, bool Deamortized = false>
class cached_memeff {
 public:
  using value_type = T;
  using pool = slab_pool<T, Deamortized, Hooks>;
  using node = typename pool::slab::node;
  static constexpr progress progress_guarantee = progress::lock_free;
  static constexpr bool supports_store = true;
  static constexpr const char* name = "cached-me";

  cached_memeff() noexcept : cached_memeff(T{}) {}
  explicit cached_memeff(const T& initial) noexcept : cache_(initial) {}
  cached_memeff(const cached_memeff&) = delete;
  cached_memeff& operator=(const cached_memeff&) = delete;
  // Hands a still-installed node back to its owner's next reclaim.
  ~cached_memeff() {
    const std::uintptr_t w = backup_.load();
    if (!tagged_word::is_null(w)) as_node(w)->is_installed.store(false);
  }

  T load() {
    Hooks::at("cme.load.version");
    std::uint64_t ver = version_.load();
    Hooks::at("cme.load.cache");
    Hooks::steps(words_of<T>);
    T val = cache_.read();
    Hooks::at("cme.load.backup");
    std::uintptr_t p = backup_.load();
    Hooks::at("cme.load.recheck");
    if (tagged_word::is_null(p) && ver == version_.load()) return val;
    hazard_guard h;
    while (!try_load_indirect(ver, p, val, h)) {
    }
    return val;
  }

  bool cas(const T& expected, const T& desired) {
    Hooks::at("cme.cas.version");
    std::uint64_t ver = version_.load();
    T val;
    std::uintptr_t p;
    hazard_guard h;
    // A failed attempt means the value changed meanwhile, and installs never
    // write an equal value, so some intermediate value differed from expected.
    if (!try_load_indirect(ver, p, val, h)) return false;
    if (!bitwise_equal(val, expected)) return false;
    if (bitwise_equal(expected, desired)) return true;

    node* fresh = pool::local().get_free_node(desired);
    const std::uintptr_t fresh_word = reinterpret_cast<std::uintptr_t>(fresh);
    const std::uintptr_t old = p;
    Hooks::at("cme.cas.install");
    if (backup_.compare_exchange_strong(p, fresh_word)) {
      if (!tagged_word::is_null(p)) {
        Hooks::at("cme.cas.displace");
        as_node(p)->is_installed.store(false);
      }
      try_seqlock(ver, desired, fresh_word, h);
      return true;
    }
    if (!tagged_word::is_null(old) && tagged_word::is_null(p)) {
      // The node we read was uninstalled after being cached; the cache now
      // carries its value under the tag p. Revalidate and retry once.
      Hooks::at("cme.cas.reread_version");
      ver = version_.load();
      Hooks::at("cme.cas.reread_cache");
      Hooks::steps(words_of<T>);
      val = cache_.read();
      if ((ver & 1) == 0 && ver == tagged_word::version_of(p) && bitwise_equal(val, expected)) {
        Hooks::at("cme.cas.install_retry");
        if (backup_.compare_exchange_strong(p, fresh_word)) {
          try_seqlock(ver, desired, fresh_word, h);
          return true;
        }
      }
    }
    Hooks::at("cme.cas.failed");
    pool::local().free_node(fresh);
    return false;
  }

  void store(const T& desired) {
    for (;;) {
      Hooks::at("cme.store.retry");
      if (cas(load(), desired)) return;
    }
  }

  struct debug_state {
    std::uint64_t version;
    bool backup_is_null;
    std::uint64_t null_tag;
    T cache;
    T backup_value;  // meaningful only when !backup_is_null
    std::uintptr_t backup_word;
  };
  debug_state inspect() const {
    const std::uintptr_t w = backup_.load();
    debug_state s{version_.load(), tagged_word::is_null(w), 0, cache_.read(), T{}, w};
    if (s.backup_is_null)
      s.null_tag = tagged_word::version_of(w);
    else
      s.backup_value = as_node(w)->value;
    return s;
  }

 private:
  static node* as_node(std::uintptr_t w) noexcept { return reinterpret_cast<node*>(w); }
  static const void* strip(std::uintptr_t w) noexcept {
    return tagged_word::is_null(w) ? nullptr : reinterpret_cast<const void*>(w);
  }

  bool try_load_indirect(std::uint64_t& ver, std::uintptr_t& p, T& val, hazard_guard& h) {
    p = h.protect<Hooks>(backup_, strip);
    if (!tagged_word::is_null(p)) {
      Hooks::at("cme.indirect.node");
      Hooks::steps(words_of<T>);
      val = as_node(p)->value;
      return true;
    }
    Hooks::at("cme.indirect.version");
    ver = version_.load();
    Hooks::at("cme.indirect.cache");
    Hooks::steps(words_of<T>);
    val = cache_.read();
    Hooks::at("cme.indirect.backup");
    p = backup_.load();
    Hooks::at("cme.indirect.recheck");
    return tagged_word::is_null(p) && ver == version_.load();
  }

  // Cache desired and swap the installed node p for a tagged null. If p was
  // overwritten meanwhile, adopt the overwriting node's value and repeat,
  // until someone else takes the lock or the backup is already null.
  void try_seqlock(std::uint64_t ver, T desired, std::uintptr_t p, hazard_guard& h) {
    for (;;) {
      Hooks::at("cme.seqlock.lock");
      if ((ver & 1) != 0 || !version_.compare_exchange_strong(ver, ver + 1)) return;
      Hooks::at("cme.seqlock.write");
      Hooks::steps(words_of<T>);
      cache_.write(desired);
      Hooks::at("cme.seqlock.unlock");
      ver += 2;
      version_.store(ver);
      Hooks::at("cme.seqlock.uninstall");
      if (backup_.compare_exchange_strong(p, tagged_word::null_for(ver))) {
        Hooks::at("cme.seqlock.release_node");
        as_node(p)->is_installed.store(false);
        return;
      }
      if (tagged_word::is_null(p)) return;
      p = h.protect<Hooks>(backup_, strip);
      if (tagged_word::is_null(p)) return;
      Hooks::at("cme.seqlock.adopt");
      Hooks::steps(words_of<T>);
      desired = as_node(p)->value;
    }
  }

  std::atomic<std::uint64_t> version_{0};
  std::atomic<std::uintptr_t> backup_{tagged_word::null_for(0)};
  inline_words<T> cache_;
};

}  // namespace bigatomic
