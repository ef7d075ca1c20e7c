#pragma once

#include <atomic>
#include <cstdint>

#include "bigatomic/hazard.hpp"
#include "bigatomic/hooks.hpp"
#include "bigatomic/node_stats.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic {

// Mark bit packed into the low bit of an 8-aligned node pointer.
struct marked_ptr {
  static constexpr std::uintptr_t kMark = 1;
  static bool is_marked(std::uintptr_t w) noexcept { return w & kMark; }
  static std::uintptr_t mark(std::uintptr_t w) noexcept { return w | kMark; }
  static std::uintptr_t unmark(std::uintptr_t w) noexcept { return w & ~kMark; }
  template <class Node>
  static Node* ptr(std::uintptr_t w) noexcept {
    return reinterpret_cast<Node*>(unmark(w));
  }
  template <class Node>
  static std::uintptr_t word(Node* p) noexcept {
    return reinterpret_cast<std::uintptr_t>(p);
  }
};

// Wait-free Load/CAS big atomic with an inline cache.
//
// The backup pointer always references a node holding the current value;
// updates linearize when they swing it. A set mark on the backup means the
// inline cache may be stale. Loads take the cache when the backup is
// unmarked and the version did not move; otherwise they read the node.
template <word_copyable T, class Hooks = no_hooks>
class cached_waitfree {
 public:
  using value_type = T;
  static constexpr progress progress_guarantee = progress::wait_free;
  static constexpr bool supports_store = false;
  static constexpr const char* name = "cached-wf";

  struct alignas(8) node : counted_node<node> {
    explicit node(const T& v) : value(v) {}
    const T value;
  };

  cached_waitfree() : cached_waitfree(T{}) {}
  explicit cached_waitfree(const T& initial)
      : backup_(marked_ptr::word(new node(initial))), cache_(initial) {}
  cached_waitfree(const cached_waitfree&) = delete;
  cached_waitfree& operator=(const cached_waitfree&) = delete;
  ~cached_waitfree() { delete marked_ptr::ptr<node>(backup_.load()); }

  T load() {
    Hooks::at("cwf.load.version");
    const std::uint64_t ver = version_.load();
    Hooks::at("cwf.load.cache");
    Hooks::steps(words_of<T>);
    const T val = cache_.read();
    Hooks::at("cwf.load.backup");
    const std::uintptr_t p = backup_.load();
    Hooks::at("cwf.load.recheck");
    if (!marked_ptr::is_marked(p) && ver == version_.load()) return val;
    hazard_guard h;
    const std::uintptr_t q = h.protect<Hooks>(backup_, strip);
    Hooks::at("cwf.load.node");
    Hooks::steps(words_of<T>);
    return marked_ptr::ptr<node>(q)->value;
  }

  bool cas(const T& expected, const T& desired) {
    hazard_guard h;
    Hooks::at("cwf.cas.version");
    std::uint64_t ver = version_.load();
    Hooks::at("cwf.cas.cache");
    Hooks::steps(words_of<T>);
    T val = cache_.read();
    std::uintptr_t p = h.protect<Hooks>(backup_, strip);
    Hooks::at("cwf.cas.recheck");
    if (marked_ptr::is_marked(p) || ver != version_.load()) {
      Hooks::at("cwf.cas.node");
      Hooks::steps(words_of<T>);
      val = marked_ptr::ptr<node>(p)->value;
    }
    if (!bitwise_equal(val, expected)) return false;
    if (bitwise_equal(expected, desired)) return true;

    const std::uintptr_t fresh = marked_ptr::mark(marked_ptr::word(new node(desired)));
    const std::uintptr_t old = p;
    Hooks::at("cwf.cas.install");
    bool installed = backup_.compare_exchange_strong(p, fresh);
    if (!installed && p == marked_ptr::unmark(old)) {
      // The incumbent writer validated its node since we read it.
      Hooks::at("cwf.cas.install_retry");
      installed = backup_.compare_exchange_strong(p, fresh);
    }
    if (!installed) {
      Hooks::at("cwf.cas.failed");
      delete marked_ptr::ptr<node>(fresh);
      return false;
    }
    hazard_domain::instance().retire(marked_ptr::ptr<node>(p));
    publish_cache(ver, desired, fresh);
    return true;
  }

  // Internal state for invariant audits; only meaningful while no
  // operation is executing a step.
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

  // Best effort: copy desired into the cache if no later update has touched
  // the version since ver was read, then clear the mark on our node.
  void publish_cache(std::uint64_t ver, const T& desired, std::uintptr_t installed) {
    Hooks::at("cwf.publish.lock");
    if ((ver & 1) == 0 && version_.compare_exchange_strong(ver, ver + 1)) {
      Hooks::at("cwf.publish.write");
      Hooks::steps(words_of<T>);
      cache_.write(desired);
      Hooks::at("cwf.publish.unlock");
      version_.store(ver + 2);
      Hooks::at("cwf.publish.unmark");
      backup_.compare_exchange_strong(installed, marked_ptr::unmark(installed));
    }
    Hooks::at("cwf.cas.done");
  }

  std::atomic<std::uint64_t> version_{0};
  std::atomic<std::uintptr_t> backup_;
  inline_words<T> cache_;
};

}  // namespace bigatomic
