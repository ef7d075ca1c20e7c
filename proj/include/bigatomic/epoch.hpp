#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "bigatomic/hazard.hpp"
#include "bigatomic/thread_registry.hpp"

namespace bigatomic {

// Epoch-based reclamation for hash-table chain links.
//
// A thread pins the global epoch while it traverses chains. Nodes retired
// in epoch e are freed once the global epoch reaches e + 2, at which point
// every thread that could have seen them has unpinned.
class epoch_domain {
 public:
  static constexpr std::size_t kAdvanceEvery = 64;

  static epoch_domain& instance();

  epoch_domain(const epoch_domain&) = delete;
  epoch_domain& operator=(const epoch_domain&) = delete;

  void enter();
  void leave() noexcept;

  void retire(void* p, deleter_fn del);
  template <class Node>
  void retire(Node* p) {
    retire(static_cast<void*>(p), [](void* q) { delete static_cast<Node*>(q); });
  }

  // Advances the global epoch if every pinned thread has caught up.
  bool try_advance();
  // Frees everything. Only valid while no thread is pinned or retiring.
  std::size_t drain_all();

  std::uint64_t epoch() const noexcept { return global_.load(); }
  std::size_t backlog() const noexcept;

 private:
  epoch_domain();

  struct bucket {
    std::uint64_t epoch = 0;
    std::vector<std::pair<void*, deleter_fn>> items;
  };
  struct alignas(kCacheLine) local {
    // (epoch << 1) | pinned
    std::atomic<std::uint64_t> announce{0};
    std::size_t depth = 0;
    std::size_t since_advance = 0;
    bucket limbo[3];
    std::atomic<std::size_t> size{0};
  };

  void collect(local& l, std::uint64_t global);

  std::atomic<std::uint64_t> global_{2};
  std::unique_ptr<local[]> locals_;
};

class epoch_guard {
 public:
  epoch_guard() { epoch_domain::instance().enter(); }
  ~epoch_guard() { epoch_domain::instance().leave(); }
  epoch_guard(const epoch_guard&) = delete;
  epoch_guard& operator=(const epoch_guard&) = delete;
};

}  // namespace bigatomic
