#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bigatomic/big_atomic.hpp"

namespace bigatomic::bench {

enum class bench_mode { array, hash, hash_chaining };

const char* to_string(bench_mode m) noexcept;
std::optional<bench_mode> parse_mode(std::string_view s) noexcept;

struct bench_config {
  impl_kind impl = impl_kind::cached_me;
  bench_mode mode = bench_mode::array;
  std::size_t p = 1;
  std::uint64_t n = 10'000'000;
  unsigned u = 5;   // update percent
  double z = 0;     // Zipfian exponent
  unsigned k = 4;   // payload words; hash modes always use 3-word links
  double seconds = 5;
  double warmup = 1;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument naming the offending parameter.
  void validate() const;
  // Words per cell as reported: k for arrays, the link size for tables.
  unsigned reported_k() const noexcept { return mode == bench_mode::array ? k : 3; }
};

}  // namespace bigatomic::bench
