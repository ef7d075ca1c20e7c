#pragma once

#include <atomic>

#include "bigatomic/hazard.hpp"
#include "bigatomic/hooks.hpp"
#include "bigatomic/node_stats.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic {

// Classic indirection: the cell is one word pointing at an immutable heap
// node holding the value. Loads read through the pointer under a hazard
// guard; updates swing the pointer.
template <word_copyable T, class Hooks = no_hooks>
class indirect {
 public:
  using value_type = T;
  static constexpr progress progress_guarantee = progress::lock_free;
  static constexpr bool supports_store = true;
  static constexpr const char* name = "indirect";

  struct node : counted_node<node> {
    explicit node(const T& v) : value(v) {}
    const T value;
  };

  indirect() : indirect(T{}) {}
  explicit indirect(const T& initial) : current_(new node(initial)) {}
  indirect(const indirect&) = delete;
  indirect& operator=(const indirect&) = delete;
  ~indirect() { delete current_.load(); }

  T load() {
    hazard_guard h;
    node* p = h.protect<Hooks>(current_, identity);
    Hooks::at("indirect.read");
    Hooks::steps(words_of<T>);
    return p->value;
  }

  // Stores may swap in a node with an equal value, so a failed pointer CAS
  // alone does not show the value changed: retry while it still matches.
  bool cas(const T& expected, const T& desired) {
    hazard_guard h;
    node* fresh = nullptr;
    for (;;) {
      node* p = h.protect<Hooks>(current_, identity);
      Hooks::at("indirect.read");
      Hooks::steps(words_of<T>);
      if (!bitwise_equal(p->value, expected)) {
        delete fresh;
        return false;
      }
      if (bitwise_equal(expected, desired)) return true;
      if (!fresh) fresh = new node(desired);
      Hooks::at("indirect.cas.install");
      if (current_.compare_exchange_strong(p, fresh)) {
        hazard_domain::instance().retire(p);
        return true;
      }
    }
  }

  // Unconditional: an equal value still installs a fresh node.
  void store(const T& desired) {
    auto* fresh = new node(desired);
    Hooks::at("indirect.store.exchange");
    node* old = current_.exchange(fresh);
    hazard_domain::instance().retire(old);
  }

  const node* current_node() const noexcept { return current_.load(); }

 private:
  static const void* identity(node* p) noexcept { return p; }

  std::atomic<node*> current_;
};

}  // namespace bigatomic
