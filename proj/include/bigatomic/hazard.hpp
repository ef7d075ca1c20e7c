#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "bigatomic/hooks.hpp"
#include "bigatomic/thread_registry.hpp"

namespace bigatomic {

using deleter_fn = void (*)(void*);

// Hazard-pointer domain shared by every node type in the process.
//
// Each thread id owns kSlotsPerThread announcement slots and a private
// retire list. A retired node is freed by a scan only once no slot
// announces it; a scan runs when the list reaches the retire threshold.
class hazard_domain {
 public:
  static constexpr std::size_t kSlotsPerThread = 2;
  static constexpr std::size_t kDefaultRetireThreshold = 1000;

  static hazard_domain& instance();

  hazard_domain(const hazard_domain&) = delete;
  hazard_domain& operator=(const hazard_domain&) = delete;

  void retire(void* p, deleter_fn del);

  template <class Node>
  void retire(Node* p) {
    retire(static_cast<void*>(p), [](void* q) { delete static_cast<Node*>(q); });
  }

  // Frees every node on the caller's retire list that is not announced.
  std::size_t scan();
  // Scans every thread's list. Only valid while no other thread retires.
  std::size_t drain_all();

  // Retired but not yet freed, summed over threads.
  std::size_t backlog() const noexcept;
  std::size_t freed_total() const noexcept;

  std::size_t retire_threshold() const noexcept { return threshold_.load(); }
  void set_retire_threshold(std::size_t t) noexcept { threshold_.store(t); }

  std::atomic<const void*>& slot(std::size_t tid, std::size_t i) noexcept {
    return slots_[tid * kSlotsPerThread + i].ptr;
  }

  // Calls f(ptr) for every non-null announcement of registered threads.
  template <class F>
  void for_each_announced(F&& f) const {
    const std::size_t n = thread_registry::high_water() * kSlotsPerThread;
    for (std::size_t i = 0; i < n; ++i)
      if (const void* p = slots_[i].ptr.load()) f(p);
  }

 private:
  hazard_domain();

  struct alignas(kCacheLine) announce_slot {
    std::atomic<const void*> ptr{nullptr};
  };
  struct retired {
    void* ptr;
    deleter_fn del;
  };
  struct alignas(kCacheLine) retire_list {
    std::vector<retired> items;
    std::atomic<std::size_t> size{0};
    std::atomic<std::size_t> freed{0};
  };

  std::size_t scan_list(retire_list& list);

  std::unique_ptr<announce_slot[]> slots_;
  std::unique_ptr<retire_list[]> lists_;
  std::atomic<std::size_t> threshold_{kDefaultRetireThreshold};
};

// Owns one of the calling thread's announcement slots for its lifetime.
class hazard_guard {
 public:
  hazard_guard();
  ~hazard_guard();
  hazard_guard(const hazard_guard&) = delete;
  hazard_guard& operator=(const hazard_guard&) = delete;

  // Announce-then-revalidate: returns a word read from src whose node
  // (strip(word), possibly null) was announced before the word was seen
  // again unchanged. Each failed revalidation implies a concurrent update.
  template <class Hooks = no_hooks, class Word, class Strip>
  Word protect(const std::atomic<Word>& src, Strip strip) {
    Hooks::at("hp.load");
    Word w = src.load();
    for (std::size_t attempt = 0;; ++attempt) {
      Hooks::at("hp.announce");
      slot_->store(strip(w));
      Hooks::at("hp.validate");
      const Word again = src.load();
      if (again == w) return w;
      if constexpr (Hooks::enabled) Hooks::retry_steps(2);
      w = again;
    }
  }

  void announce(const void* p) noexcept { slot_->store(p); }
  void reset() noexcept { slot_->store(nullptr); }

 private:
  std::atomic<const void*>* slot_;
  std::size_t index_;
};

}  // namespace bigatomic
