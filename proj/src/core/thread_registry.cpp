#include "bigatomic/thread_registry.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace bigatomic {
namespace {

constexpr std::size_t kDefaultMaxThreads = 64;

struct registry_state {
  std::atomic<std::size_t> max{kDefaultMaxThreads};
  std::atomic<bool> frozen{false};
  std::atomic<std::size_t> high_water{0};
  std::atomic<std::size_t> live{0};
  std::array<std::atomic<bool>, kHardMaxThreads> in_use{};
};

registry_state& state() {
  static registry_state s;
  return s;
}

}  // namespace

struct registry_slot_holder {
  std::size_t id = kHardMaxThreads;
  ~registry_slot_holder() {
    if (id != kHardMaxThreads) thread_registry::release(id);
  }
};

namespace {
thread_local registry_slot_holder tl_slot;
}

void thread_registry::configure(std::size_t max_threads) {
  auto& s = state();
  if (max_threads == 0 || max_threads > kHardMaxThreads)
    throw std::logic_error("thread registry: max threads must be in [1, " +
                           std::to_string(kHardMaxThreads) + "]");
  if (s.frozen.load())
    throw std::logic_error("thread registry: already in use, cannot reconfigure");
  s.max.store(max_threads);
}

std::size_t thread_registry::max_threads() noexcept { return state().max.load(); }

std::size_t thread_registry::id() {
  if (tl_slot.id == kHardMaxThreads) tl_slot.id = acquire();
  return tl_slot.id;
}

std::size_t thread_registry::high_water() noexcept { return state().high_water.load(); }

std::size_t thread_registry::live() noexcept { return state().live.load(); }

std::size_t thread_registry::acquire() {
  auto& s = state();
  s.frozen.store(true);
  const std::size_t max = s.max.load();
  for (std::size_t i = 0; i < max; ++i) {
    bool expected = false;
    if (!s.in_use[i].load() && s.in_use[i].compare_exchange_strong(expected, true)) {
      std::size_t hw = s.high_water.load();
      while (hw < i + 1 && !s.high_water.compare_exchange_weak(hw, i + 1)) {
      }
      s.live.fetch_add(1);
      return i;
    }
  }
  throw std::runtime_error("thread registry: more than " + std::to_string(max) +
                           " threads registered");
}

void thread_registry::release(std::size_t id) noexcept {
  auto& s = state();
  s.live.fetch_sub(1);
  s.in_use[id].store(false);
}

sharded_counter::sharded_counter() : shards_(std::make_unique<shard[]>(kHardMaxThreads)) {}

void sharded_counter::add(std::int64_t d) {
  auto& v = shards_[thread_registry::id()].value;
  v.store(v.load(std::memory_order_relaxed) + d, std::memory_order_relaxed);
}

std::int64_t sharded_counter::sum() const noexcept {
  std::int64_t total = 0;
  const std::size_t hw = thread_registry::high_water();
  for (std::size_t i = 0; i < hw; ++i) total += shards_[i].value.load();
  return total;
}

void sharded_counter::reset() noexcept {
  for (std::size_t i = 0; i < kHardMaxThreads; ++i) shards_[i].value.store(0);
}

}  // namespace bigatomic
