#include "bigatomic/bench/zipf.hpp"

#include <cmath>
#include <stdexcept>

namespace bigatomic::bench {
namespace {

// log1p(x)/x and expm1(x)/x, stable near zero.
double log1p_over(double x) {
  if (std::abs(x) > 1e-8) return std::log1p(x) / x;
  return 1 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
}
double expm1_over(double x) {
  if (std::abs(x) > 1e-8) return std::expm1(x) / x;
  return 1 + x * 0.5 * (1 + x * (1.0 / 3.0) * (1 + 0.25 * x));
}

}  // namespace

double harmonic(std::uint64_t n, double z) {
  // Smallest terms first to limit rounding error.
  double sum = 0;
  for (std::uint64_t i = n; i >= 1; --i) sum += std::pow(static_cast<double>(i), -z);
  return sum;
}

zipf_sampler::zipf_sampler(std::uint64_t n, double z) : n_(n), z_(z), uniform_(z == 0) {
  if (n == 0) throw std::invalid_argument("zipf: n must be at least 1");
  if (!(z >= 0) || z >= 1) throw std::invalid_argument("zipf: z must be in [0, 1)");
  if (uniform_) return;
  h_x1_ = h_integral(1.5) - 1;
  h_n_ = h_integral(static_cast<double>(n) + 0.5);
  s_ = 2 - h_integral_inverse(h_integral(2.5) - h(2));
}

double zipf_sampler::h(double x) const { return std::exp(-z_ * std::log(x)); }

double zipf_sampler::h_integral(double x) const {
  const double lx = std::log(x);
  return expm1_over((1 - z_) * lx) * lx;
}

double zipf_sampler::h_integral_inverse(double x) const {
  double t = x * (1 - z_);
  if (t < -1) t = -1;
  return std::exp(log1p_over(t) * x);
}

}  // namespace bigatomic::bench
