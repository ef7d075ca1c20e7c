#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <type_traits>

namespace bigatomic {

using word_t = std::uint64_t;
inline constexpr std::size_t kWordBytes = sizeof(word_t);
inline constexpr std::size_t kMaxPayloadWords = 16;

// A value that can live in a big atomic: trivially copyable and a whole
// number of machine words. Equality is always bitwise.
template <class T>
concept word_copyable = std::is_trivially_copyable_v<T> && sizeof(T) >= kWordBytes &&
                        sizeof(T) % kWordBytes == 0 && alignof(T) <= alignof(word_t);

template <word_copyable T>
inline constexpr std::size_t words_of = sizeof(T) / kWordBytes;

template <word_copyable T>
bool bitwise_equal(const T& a, const T& b) noexcept {
  return std::memcmp(&a, &b, sizeof(T)) == 0;
}

// Fixed-size k-word payload used by the benchmarks and tests.
template <std::size_t K>
struct payload {
  static_assert(K >= 1 && K <= kMaxPayloadWords, "payload size must be 1..16 words");
  static constexpr std::size_t size = K;

  std::array<word_t, K> words{};

  static constexpr payload filled(word_t x) noexcept {
    payload p;
    p.words.fill(x);
    return p;
  }

  // True when every word holds the same value; used by torn-read probes.
  constexpr bool uniform() const noexcept {
    for (std::size_t i = 1; i < K; ++i)
      if (words[i] != words[0]) return false;
    return true;
  }

  friend constexpr bool operator==(const payload&, const payload&) = default;
};

enum class progress { blocking, lock_free, wait_free };

constexpr const char* to_string(progress p) noexcept {
  switch (p) {
    case progress::blocking: return "blocking";
    case progress::lock_free: return "lock-free";
    case progress::wait_free: return "wait-free";
  }
  return "?";
}

// Inline k-word storage accessed one word at a time with sequentially
// consistent atomics. A multi-word copy may mix words from different
// writers; callers mask that with version validation.
template <word_copyable T>
class inline_words {
 public:
  static constexpr std::size_t count = words_of<T>;

  inline_words() noexcept : inline_words(T{}) {}
  explicit inline_words(const T& v) noexcept { write(v); }

  T read() const noexcept {
    std::array<word_t, count> tmp;
    for (std::size_t i = 0; i < count; ++i) tmp[i] = words_[i].load();
    return std::bit_cast<T>(tmp);
  }

  void write(const T& v) noexcept {
    const auto tmp = std::bit_cast<std::array<word_t, count>>(v);
    for (std::size_t i = 0; i < count; ++i) words_[i].store(tmp[i]);
  }

 private:
  std::array<std::atomic<word_t>, count> words_;
};

}  // namespace bigatomic
