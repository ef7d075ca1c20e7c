#include <stdexcept>
#include <string>

#include "bigatomic/bench/config.hpp"
#include "bigatomic/thread_registry.hpp"

namespace bigatomic::bench {

void bench_config::validate() const {
  auto bad = [](const std::string& m) { throw std::invalid_argument(m); };
  if (p < 1) bad("p must be at least 1");
  // Workers plus the driving thread each hold a registry id.
  if (p + 1 > thread_registry::max_threads())
    bad("p = " + std::to_string(p) + " exceeds the thread registry limit of " +
        std::to_string(thread_registry::max_threads() - 1));
  if (n < 1) bad("n must be at least 1");
  if (u > 100) bad("u must be in 0..100, got " + std::to_string(u));
  if (!(z >= 0) || z > 0.99) bad("z must be in [0, 0.99], got " + std::to_string(z));
  if (mode == bench_mode::array && (k < 1 || k > kMaxPayloadWords))
    bad("k must be in 1..16, got " + std::to_string(k));
  if (!(seconds > 0)) bad("seconds must be positive");
  if (!(warmup >= 0)) bad("warmup must be non-negative");
}

}  // namespace bigatomic::bench
