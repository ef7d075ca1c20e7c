#include "bigatomic/epoch.hpp"

namespace bigatomic {

epoch_domain& epoch_domain::instance() {
  static epoch_domain d;
  return d;
}

epoch_domain::epoch_domain() : locals_(std::make_unique<local[]>(kHardMaxThreads)) {}

void epoch_domain::enter() {
  auto& l = locals_[thread_registry::id()];
  if (l.depth++ > 0) return;
  // Announce, then confirm the epoch did not move past us meanwhile.
  std::uint64_t e = global_.load();
  for (;;) {
    l.announce.store((e << 1) | 1);
    const std::uint64_t again = global_.load();
    if (again == e) break;
    e = again;
  }
  collect(l, e);
}

void epoch_domain::leave() noexcept {
  auto& l = locals_[thread_registry::id()];
  if (--l.depth > 0) return;
  l.announce.store(l.announce.load() & ~std::uint64_t{1});
}

void epoch_domain::collect(local& l, std::uint64_t global) {
  std::size_t freed = 0;
  for (auto& b : l.limbo) {
    if (!b.items.empty() && b.epoch + 2 <= global) {
      for (auto& [p, del] : b.items) del(p);
      freed += b.items.size();
      b.items.clear();
    }
  }
  if (freed) l.size.store(l.size.load() - freed);
}

void epoch_domain::retire(void* p, deleter_fn del) {
  auto& l = locals_[thread_registry::id()];
  const std::uint64_t e = global_.load();
  collect(l, e);
  auto& b = l.limbo[e % 3];
  if (!b.items.empty() && b.epoch != e) {
    // Last used in an epoch <= e - 3, so already reclaimable.
    for (auto& [q, d] : b.items) d(q);
    l.size.store(l.size.load() - b.items.size());
    b.items.clear();
  }
  b.epoch = e;
  b.items.emplace_back(p, del);
  l.size.store(l.size.load() + 1);
  if (++l.since_advance >= kAdvanceEvery) {
    l.since_advance = 0;
    if (try_advance()) collect(l, global_.load());
  }
}

bool epoch_domain::try_advance() {
  std::uint64_t e = global_.load();
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) {
    const std::uint64_t a = locals_[i].announce.load();
    if ((a & 1) && (a >> 1) != e) return false;
  }
  return global_.compare_exchange_strong(e, e + 1);
}

std::size_t epoch_domain::drain_all() {
  std::size_t freed = 0;
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) {
    auto& l = locals_[i];
    for (auto& b : l.limbo) {
      for (auto& [p, del] : b.items) del(p);
      freed += b.items.size();
      b.items.clear();
    }
    l.size.store(0);
  }
  return freed;
}

std::size_t epoch_domain::backlog() const noexcept {
  std::size_t total = 0;
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) total += locals_[i].size.load();
  return total;
}

}  // namespace bigatomic
