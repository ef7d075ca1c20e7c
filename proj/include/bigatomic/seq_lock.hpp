#pragma once

#include <atomic>
#include <cstdint>
#include <thread>

#include "bigatomic/hooks.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic {

struct no_backoff {
  void pause() noexcept {}
};

// Exponential backoff for contended lock acquisition, capped at 1024 spins.
struct exponential_backoff {
  unsigned spins = 1;
  void pause() noexcept {
    for (unsigned i = 0; i < spins; ++i) std::atomic_signal_fence(std::memory_order_seq_cst);
    if (spins < 1024) spins <<= 1;
  }
};

// Sequence lock: odd version means a writer holds the cell. Readers copy
// the data between two equal even version reads; writers bump the version
// to odd, write, and bump again.
template <word_copyable T, class Hooks = no_hooks, class Backoff = no_backoff>
class seq_lock {
 public:
  using value_type = T;
  static constexpr progress progress_guarantee = progress::blocking;
  static constexpr bool supports_store = true;
  static constexpr const char* name = "seqlock";

  seq_lock() noexcept = default;
  explicit seq_lock(const T& initial) noexcept : data_(initial) {}
  seq_lock(const seq_lock&) = delete;
  seq_lock& operator=(const seq_lock&) = delete;

  T load() noexcept {
    for (;;) {
      Hooks::at("seqlock.load.version");
      const std::uint64_t v = version_.load();
      if (v & 1) continue;
      Hooks::at("seqlock.load.data");
      Hooks::steps(words_of<T>);
      T val = data_.read();
      Hooks::at("seqlock.load.recheck");
      if (version_.load() == v) return val;
    }
  }

  void store(const T& desired) noexcept {
    write([&](const T&) { return true; }, desired);
  }

  bool cas(const T& expected, const T& desired) noexcept {
    return write([&](const T& current) { return bitwise_equal(current, expected); }, desired);
  }

  std::uint64_t version() const noexcept { return version_.load(); }

 private:
  // Lock, decide on the current data, write if accepted, unlock with +2
  // either way.
  template <class Decide>
  bool write(Decide decide, const T& desired) noexcept {
    const std::uint64_t v = lock();
    Hooks::at("seqlock.write.read");
    Hooks::steps(words_of<T>);
    const T current = data_.read();
    const bool accept = decide(current);
    if (accept && !bitwise_equal(current, desired)) {
      Hooks::at("seqlock.write.data");
      Hooks::steps(words_of<T>);
      data_.write(desired);
    }
    Hooks::at("seqlock.write.unlock");
    version_.store(v + 2);
    return accept;
  }

  std::uint64_t lock() noexcept {
    Backoff backoff;
    for (;;) {
      Hooks::at("seqlock.write.version");
      std::uint64_t v = version_.load();
      if (!(v & 1)) {
        Hooks::at("seqlock.write.lock");
        if (version_.compare_exchange_strong(v, v + 1)) {
          Hooks::at("seqlock.write.locked");
          return v;
        }
      }
      backoff.pause();
    }
  }

  std::atomic<std::uint64_t> version_{0};
  inline_words<T> data_;
};

}  // namespace bigatomic
