#pragma once

// Deliberately broken cells. The harness must catch each of them; a probe
// or audit that passes on these is not testing anything.

#include <atomic>
#include <cstdint>

#include "bigatomic/cached_waitfree.hpp"
#include "bigatomic/hazard.hpp"
#include "bigatomic/hooks.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic::lincheck {

// Sequence lock whose readers skip the version check entirely.
template <word_copyable T, class Hooks = no_hooks>
class unvalidated_seqlock {
 public:
  using value_type = T;
  static constexpr progress progress_guarantee = progress::blocking;
  static constexpr bool supports_store = true;
  static constexpr const char* name = "mutant-seqlock";

  unvalidated_seqlock() noexcept = default;
  explicit unvalidated_seqlock(const T& initial) noexcept : data_(initial) {}

  T load() noexcept {
    Hooks::at("mutant.load.data");
    return data_.read();
  }

  void store(const T& desired) noexcept {
    std::uint64_t v = lock();
    Hooks::at("mutant.write.data");
    data_.write(desired);
    version_.store(v + 2);
  }

  bool cas(const T& expected, const T& desired) noexcept {
    std::uint64_t v = lock();
    const bool ok = bitwise_equal(data_.read(), expected);
    if (ok) {
      Hooks::at("mutant.write.data");
      data_.write(desired);
    }
    version_.store(v + 2);
    return ok;
  }

 private:
  std::uint64_t lock() noexcept {
    for (;;) {
      Hooks::at("mutant.write.lock");
      std::uint64_t v = version_.load();
      if (!(v & 1) && version_.compare_exchange_strong(v, v + 1)) return v;
    }
  }

  std::atomic<std::uint64_t> version_{0};
  inline_words<T> data_;
};

// The wait-free cached cell with the publish step's version re-check
// removed: a writer takes the cache lock whenever the version is even,
// even if other updates completed after it read the version, and so can
// overwrite the cache with a stale value.
template <word_copyable T, class Hooks = no_hooks>
class stale_publish_waitfree {
 public:
  using value_type = T;
  static constexpr progress progress_guarantee = progress::wait_free;
  static constexpr bool supports_store = false;
  static constexpr const char* name = "mutant-cached-wf";

  struct alignas(8) node {
    explicit node(const T& v) : value(v) {}
    const T value;
  };

  stale_publish_waitfree() : stale_publish_waitfree(T{}) {}
  explicit stale_publish_waitfree(const T& initial)
      : backup_(marked_ptr::word(new node(initial))), cache_(initial) {}
  stale_publish_waitfree(const stale_publish_waitfree&) = delete;
  stale_publish_waitfree& operator=(const stale_publish_waitfree&) = delete;
  ~stale_publish_waitfree() { delete marked_ptr::ptr<node>(backup_.load()); }

  T load() {
    Hooks::at("cwf.load.version");
    const std::uint64_t ver = version_.load();
    Hooks::at("cwf.load.cache");
    const T val = cache_.read();
    Hooks::at("cwf.load.backup");
    const std::uintptr_t p = backup_.load();
    Hooks::at("cwf.load.recheck");
    if (!marked_ptr::is_marked(p) && ver == version_.load()) return val;
    hazard_guard h;
    const std::uintptr_t q = h.protect<Hooks>(backup_, strip);
    Hooks::at("cwf.load.node");
    return marked_ptr::ptr<node>(q)->value;
  }

  bool cas(const T& expected, const T& desired) {
    hazard_guard h;
    Hooks::at("cwf.cas.version");
    std::uint64_t ver = version_.load();
    Hooks::at("cwf.cas.cache");
    T val = cache_.read();
    std::uintptr_t p = h.protect<Hooks>(backup_, strip);
    Hooks::at("cwf.cas.recheck");
    if (marked_ptr::is_marked(p) || ver != version_.load()) {
      Hooks::at("cwf.cas.node");
      val = marked_ptr::ptr<node>(p)->value;
    }
    if (!bitwise_equal(val, expected)) return false;
    if (bitwise_equal(expected, desired)) return true;
    const std::uintptr_t fresh = marked_ptr::mark(marked_ptr::word(new node(desired)));
    const std::uintptr_t old = p;
    Hooks::at("cwf.cas.install");
    bool installed = backup_.compare_exchange_strong(p, fresh);
    if (!installed && p == marked_ptr::unmark(old)) {
      Hooks::at("cwf.cas.install_retry");
      installed = backup_.compare_exchange_strong(p, fresh);
    }
    if (!installed) {
      delete marked_ptr::ptr<node>(fresh);
      return false;
    }
    hazard_domain::instance().retire(marked_ptr::ptr<node>(p));
    Hooks::at("cwf.publish.lock");
    std::uint64_t now = version_.load();
    if ((now & 1) == 0 && version_.compare_exchange_strong(now, now + 1)) {
      Hooks::at("cwf.publish.write");
      cache_.write(desired);
      Hooks::at("cwf.publish.unlock");
      version_.store(now + 2);
      Hooks::at("cwf.publish.unmark");
      std::uintptr_t expect = fresh;
      backup_.compare_exchange_strong(expect, marked_ptr::unmark(fresh));
    }
    Hooks::at("cwf.cas.done");
    return true;
  }

  struct debug_state {
    std::uint64_t version;
    bool marked;
    T cache;
    T backup_value;
    std::uintptr_t backup_word;
  };
  debug_state inspect() const {
    const std::uintptr_t w = backup_.load();
    return {version_.load(), marked_ptr::is_marked(w), cache_.read(),
            marked_ptr::ptr<node>(w)->value, w};
  }

 private:
  static const void* strip(std::uintptr_t w) noexcept {
    return reinterpret_cast<const void*>(marked_ptr::unmark(w));
  }

  std::atomic<std::uint64_t> version_{0};
  std::atomic<std::uintptr_t> backup_;
  inline_words<T> cache_;
};

}  // namespace bigatomic::lincheck
