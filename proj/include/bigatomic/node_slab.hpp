#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>

#include "bigatomic/hazard.hpp"
#include "bigatomic/hooks.hpp"
#include "bigatomic/payload.hpp"
#include "bigatomic/thread_registry.hpp"

namespace bigatomic {

template <word_copyable T>
struct alignas(8) slab_node {
  slab_node() noexcept : next(nullptr) {}

  union {
    T value;
    slab_node* next;
  };
  std::uint32_t owner = 0;
  // The only field written by threads other than the owner.
  std::atomic<bool> is_installed{false};
  // Owner-private reclamation state.
  bool was_installed = false;
  bool is_protected = false;
  bool is_free = true;
};

// A thread-private slab of backup nodes recycled without the system
// allocator. Only the owning thread allocates, frees or reclaims.
//
// Reclaim snapshots is_installed for every node *before* scanning the
// hazard announcements: a node seen uninstalled before the scan can only
// have been announced before it was uninstalled, so the scan observes it.
// Testing is_installed after the scan would race with a reader that
// announces the node and then sees it uninstalled.
//
// Amortized mode: 3P nodes, full reclaim when the free list runs dry;
// at most P are installed and at most P protected, so each reclaim
// yields at least P. Deamortized mode: 6P nodes, and every allocation
// advances an incremental reclaim by kIncrementalSteps iterations.
template <word_copyable T, bool Deamortized = false, class Hooks = no_hooks>
class node_slab {
 public:
  using node = slab_node<T>;
  static constexpr std::size_t kNodesPerThread = Deamortized ? 6 : 3;
  static constexpr std::size_t kIncrementalSteps = 6;

  node_slab(std::uint32_t owner, std::size_t max_threads)
      : size_(kNodesPerThread * max_threads), nodes_(std::make_unique<node[]>(size_)) {
    for (std::size_t i = size_; i-- > 0;) {
      nodes_[i].owner = owner;
      push(&nodes_[i]);
    }
  }

  node* get_free_node(const T& v) {
    if constexpr (Deamortized) {
      advance_reclaim(kIncrementalSteps);
      ++writes_this_phase_;
    } else if (free_ == nullptr) {
      reclaim();
    }
    if (free_ == nullptr) fatal("node slab exhausted: reclaim freed no nodes");
    node* n = free_;
    free_ = n->next;
    --free_count_;
    n->is_free = false;
    // Allocated after this phase's snapshot; keep it out of this phase.
    n->was_installed = true;
    n->value = v;
    n->is_installed.store(true);
    in_use_peak_.store(std::max(in_use_peak_.load(), size_ - free_count_));
    return n;
  }

  void free_node(node* n) noexcept {
    n->is_installed.store(false);
    push(n);
  }

  // Full three-pass reclaim; returns the number of nodes freed.
  std::size_t reclaim() {
    for (std::size_t i = 0; i < size_; ++i) nodes_[i].was_installed = nodes_[i].is_installed.load();
    Hooks::at("cme.reclaim.scan");
    hazard_domain::instance().for_each_announced([&](const void* p) {
      if (owns(p)) const_cast<node*>(static_cast<const node*>(p))->is_protected = true;
    });
    Hooks::at("cme.reclaim.free");
    std::size_t freed = 0;
    for (std::size_t i = 0; i < size_; ++i) {
      node& n = nodes_[i];
      if (!n.is_free && !n.was_installed && !n.is_protected) {
        push(&n);
        ++freed;
      }
      n.is_protected = false;
    }
    record_yield(freed);
    return freed;
  }

  bool owns(const void* p) const noexcept {
    auto* b = reinterpret_cast<const unsigned char*>(nodes_.get());
    auto* q = static_cast<const unsigned char*>(p);
    return q >= b && q < b + size_ * sizeof(node);
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t free_count() const noexcept { return free_count_; }
  std::size_t installed_count() const noexcept {
    std::size_t c = 0;
    for (std::size_t i = 0; i < size_; ++i) c += nodes_[i].is_installed.load();
    return c;
  }
  std::size_t reclaims() const noexcept { return reclaims_.load(); }
  std::size_t min_yield() const noexcept { return min_yield_.load(); }
  std::size_t in_use_peak() const noexcept { return in_use_peak_.load(); }
  // Deamortized mode: most allocations observed within one full phase.
  std::size_t max_phase_writes() const noexcept { return max_phase_writes_.load(); }
  // Deamortized mode: smallest value over phases of yield - (in use at
  // phase start - 3P). Only 2P installed (P at any instant plus P more
  // installed while the snapshot pass is in progress) and P protected
  // nodes may survive a phase, so this never goes negative.
  std::int64_t min_phase_slack() const noexcept { return min_phase_slack_.load(); }

 private:
  [[noreturn]] static void fatal(const char* msg) noexcept {
    std::fprintf(stderr, "bigatomic: fatal: %s\n", msg);
    std::abort();
  }

  void push(node* n) noexcept {
    n->is_free = true;
    n->next = free_;
    free_ = n;
    ++free_count_;
  }

  void record_yield(std::size_t freed) noexcept {
    reclaims_.store(reclaims_.load() + 1);
    min_yield_.store(std::min(min_yield_.load(), freed));
  }

  // One iteration per step over: snapshot pass, announcement pass, free
  // pass. Completing the free pass ends a phase.
  void advance_reclaim(std::size_t steps) {
    auto& hp = hazard_domain::instance();
    while (steps-- > 0) {
      switch (phase_) {
        case 0:
          nodes_[cursor_].was_installed = nodes_[cursor_].is_installed.load();
          if (++cursor_ == size_) {
            phase_ = 1;
            cursor_ = 0;
            scan_limit_ = thread_registry::high_water() * hazard_domain::kSlotsPerThread;
          }
          break;
        case 1:
          if (cursor_ < scan_limit_) {
            const void* p = hp.slot(cursor_ / hazard_domain::kSlotsPerThread,
                                    cursor_ % hazard_domain::kSlotsPerThread)
                                .load();
            if (p && owns(p)) const_cast<node*>(static_cast<const node*>(p))->is_protected = true;
          }
          if (++cursor_ >= scan_limit_) {
            phase_ = 2;
            cursor_ = 0;
          }
          break;
        default: {
          node& n = nodes_[cursor_];
          if (!n.is_free && !n.was_installed && !n.is_protected) {
            push(&n);
            ++phase_freed_;
          }
          n.is_protected = false;
          if (++cursor_ == size_) {
            record_yield(phase_freed_);
            max_phase_writes_.store(std::max(max_phase_writes_.load(), writes_this_phase_));
            const auto slack = static_cast<std::int64_t>(phase_freed_) -
                               (static_cast<std::int64_t>(phase_in_use_) -
                                static_cast<std::int64_t>(size_ / 2));
            min_phase_slack_.store(std::min(min_phase_slack_.load(), slack));
            phase_in_use_ = size_ - free_count_;
            phase_ = 0;
            cursor_ = 0;
            phase_freed_ = 0;
            writes_this_phase_ = 0;
          }
        }
      }
    }
  }

  std::size_t size_;
  std::unique_ptr<node[]> nodes_;
  node* free_ = nullptr;
  std::size_t free_count_ = 0;

  int phase_ = 0;
  std::size_t cursor_ = 0;
  std::size_t scan_limit_ = 0;
  std::size_t phase_freed_ = 0;
  std::size_t writes_this_phase_ = 0;
  std::size_t phase_in_use_ = 0;

  std::atomic<std::size_t> reclaims_{0};
  std::atomic<std::size_t> min_yield_{std::numeric_limits<std::size_t>::max()};
  std::atomic<std::size_t> in_use_peak_{0};
  std::atomic<std::size_t> max_phase_writes_{0};
  std::atomic<std::int64_t> min_phase_slack_{std::numeric_limits<std::int64_t>::max()};
};

// One slab per thread id per node type, created lazily by its owner and
// kept for the process lifetime so nodes outlive exiting threads.
template <word_copyable T, bool Deamortized = false, class Hooks = no_hooks>
class slab_pool {
 public:
  using slab = node_slab<T, Deamortized, Hooks>;

  static slab& local() {
    const std::size_t tid = thread_registry::id();
    auto& s = slabs()[tid];
    slab* p = s.load();
    if (!p) {
      p = new slab(static_cast<std::uint32_t>(tid), thread_registry::max_threads());
      s.store(p);
    }
    return *p;
  }

  template <class F>
  static void for_each(F&& f) {
    for (std::size_t i = 0; i < kHardMaxThreads; ++i)
      if (slab* p = slabs()[i].load()) f(*p);
  }

  static std::size_t installed_count() {
    std::size_t c = 0;
    for_each([&](const slab& s) { c += s.installed_count(); });
    return c;
  }

 private:
  static std::atomic<slab*>* slabs() {
    static std::unique_ptr<std::atomic<slab*>[]> table =
        std::make_unique<std::atomic<slab*>[]>(kHardMaxThreads);
    return table.get();
  }
};

}  // namespace bigatomic
