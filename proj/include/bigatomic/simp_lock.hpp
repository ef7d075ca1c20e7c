#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <type_traits>

#include "bigatomic/hooks.hpp"
#include "bigatomic/payload.hpp"
#include "bigatomic/thread_registry.hpp"

namespace bigatomic {

// Single-word test-and-set spin lock.
class spin_lock {
 public:
  template <class Hooks = no_hooks>
  void lock() noexcept {
    for (;;) {
      Hooks::at("simplock.acquire");
      if (!flag_.exchange(true)) return;
      while (flag_.load()) Hooks::at("simplock.spin");
    }
  }
  void unlock() noexcept { flag_.store(false); }
  bool locked() const noexcept { return flag_.load(); }

 private:
  std::atomic<bool> flag_{false};
};

enum class lock_placement { per_cell, pooled };

// Process-wide pool of locks shared by all pooled cells.
class lock_pool {
 public:
  static constexpr std::size_t kSize = 4096;
  static spin_lock& for_address(const void* p) noexcept {
    static std::array<padded, kSize> pool;
    auto a = reinterpret_cast<std::uintptr_t>(p);
    a ^= a >> 17;
    a *= 0x9E3779B97F4A7C15ull;
    return pool[(a >> 40) % kSize].lock;
  }

 private:
  struct alignas(kCacheLine) padded {
    spin_lock lock;
  };
};

// Every operation runs under a mutual-exclusion lock; loads included.
template <word_copyable T, class Hooks = no_hooks,
          lock_placement Placement = lock_placement::per_cell>
class simp_lock {
 public:
  using value_type = T;
  static constexpr progress progress_guarantee = progress::blocking;
  static constexpr bool supports_store = true;
  static constexpr const char* name = "simplock";

  simp_lock() noexcept = default;
  explicit simp_lock(const T& initial) noexcept : data_(initial) {}
  simp_lock(const simp_lock&) = delete;
  simp_lock& operator=(const simp_lock&) = delete;

  T load() noexcept {
    acquire();
    Hooks::at("simplock.read");
    Hooks::steps(words_of<T>);
    T v = data_.read();
    release();
    return v;
  }

  void store(const T& desired) noexcept {
    acquire();
    Hooks::at("simplock.write");
    Hooks::steps(words_of<T>);
    data_.write(desired);
    release();
  }

  bool cas(const T& expected, const T& desired) noexcept {
    acquire();
    Hooks::at("simplock.read");
    Hooks::steps(words_of<T>);
    const bool match = bitwise_equal(data_.read(), expected);
    if (match && !bitwise_equal(expected, desired)) {
      Hooks::at("simplock.write");
      Hooks::steps(words_of<T>);
      data_.write(desired);
    }
    release();
    return match;
  }

  bool is_locked() const noexcept { return lock_ref().locked(); }

 private:
  spin_lock& lock_ref() const noexcept {
    if constexpr (Placement == lock_placement::per_cell)
      return lock_;
    else
      return lock_pool::for_address(this);
  }
  void acquire() noexcept {
    lock_ref().template lock<Hooks>();
    Hooks::at("simplock.locked");
  }
  void release() noexcept {
    Hooks::at("simplock.release");
    lock_ref().unlock();
  }

  struct no_lock {};
  [[no_unique_address]] mutable std::conditional_t<Placement == lock_placement::per_cell,
                                                   spin_lock, no_lock>
      lock_;
  inline_words<T> data_;
};

}  // namespace bigatomic
