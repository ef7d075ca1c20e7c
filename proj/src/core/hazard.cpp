#include "bigatomic/hazard.hpp"

#include <algorithm>
#include <stdexcept>

namespace bigatomic {
namespace {

// Bit i set when slot i of the calling thread is held by a guard.
thread_local unsigned tl_slot_mask = 0;

}  // namespace

hazard_domain& hazard_domain::instance() {
  static hazard_domain d;
  return d;
}

hazard_domain::hazard_domain()
    : slots_(std::make_unique<announce_slot[]>(kHardMaxThreads * kSlotsPerThread)),
      lists_(std::make_unique<retire_list[]>(kHardMaxThreads)) {}

void hazard_domain::retire(void* p, deleter_fn del) {
  auto& list = lists_[thread_registry::id()];
  list.items.push_back({p, del});
  list.size.store(list.items.size());
  if (list.items.size() >= threshold_.load()) scan_list(list);
}

std::size_t hazard_domain::scan() { return scan_list(lists_[thread_registry::id()]); }

std::size_t hazard_domain::scan_list(retire_list& list) {
  if (list.items.empty()) return 0;
  std::vector<const void*> announced;
  announced.reserve(thread_registry::high_water() * kSlotsPerThread);
  for_each_announced([&](const void* p) { announced.push_back(p); });
  std::sort(announced.begin(), announced.end());

  std::size_t kept = 0;
  std::size_t freed = 0;
  for (auto& r : list.items) {
    if (std::binary_search(announced.begin(), announced.end(), r.ptr)) {
      list.items[kept++] = r;
    } else {
      r.del(r.ptr);
      ++freed;
    }
  }
  list.items.resize(kept);
  list.size.store(kept);
  list.freed.store(list.freed.load() + freed);
  return freed;
}

std::size_t hazard_domain::drain_all() {
  std::size_t freed = 0;
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) freed += scan_list(lists_[i]);
  return freed;
}

std::size_t hazard_domain::backlog() const noexcept {
  std::size_t total = 0;
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) total += lists_[i].size.load();
  return total;
}

std::size_t hazard_domain::freed_total() const noexcept {
  std::size_t total = 0;
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) total += lists_[i].freed.load();
  return total;
}

hazard_guard::hazard_guard() {
  const std::size_t tid = thread_registry::id();
  for (std::size_t i = 0; i < hazard_domain::kSlotsPerThread; ++i) {
    if (!(tl_slot_mask & (1u << i))) {
      tl_slot_mask |= 1u << i;
      index_ = i;
      slot_ = &hazard_domain::instance().slot(tid, i);
      return;
    }
  }
  throw std::logic_error("hazard_guard: all per-thread hazard slots in use");
}

hazard_guard::~hazard_guard() {
  slot_->store(nullptr);
  tl_slot_mask &= ~(1u << index_);
}

}  // namespace bigatomic
