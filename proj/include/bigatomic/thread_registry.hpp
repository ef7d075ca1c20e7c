#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

namespace bigatomic {

inline constexpr std::size_t kCacheLine = 64;
// Upper bound on concurrently registered threads; per-thread tables are
// sized by this, while the configured maximum P sizes the node slabs.
inline constexpr std::size_t kHardMaxThreads = 1024;

// Hands out small dense thread ids in [0, P). An id is held by a thread
// until it exits and is then recycled, so per-id state (retire lists,
// node slabs) outlives individual OS threads.
class thread_registry {
 public:
  // Sets P. Must be called before any thread acquires an id; throws
  // std::logic_error afterwards or when p is out of range.
  static void configure(std::size_t max_threads);
  static std::size_t max_threads() noexcept;

  // Id of the calling thread, acquired on first use. Throws
  // std::runtime_error when P threads already hold ids.
  static std::size_t id();

  // One past the largest id ever handed out; scans stop here.
  static std::size_t high_water() noexcept;
  static std::size_t live() noexcept;

 private:
  friend struct registry_slot_holder;
  static std::size_t acquire();
  static void release(std::size_t id) noexcept;
};

// Per-thread 64-bit counter sharded by thread id, so hot-path increments
// never contend. Reads sum all shards and are only exact at quiescence.
class sharded_counter {
 public:
  sharded_counter();
  void add(std::int64_t d);
  std::int64_t sum() const noexcept;
  void reset() noexcept;

 private:
  struct alignas(kCacheLine) shard {
    std::atomic<std::int64_t> value{0};
  };
  std::unique_ptr<shard[]> shards_;
};

}  // namespace bigatomic
