#pragma once

#include <cstdint>
#include <random>

namespace bigatomic::bench {

// H(n, z) = sum_{i=1..n} i^-z, by direct summation.
double harmonic(std::uint64_t n, double z);

// Draws ranks in [0, n) with P(rank r) proportional to (r + 1)^-z, using
// rejection-inversion (Hormann and Derflinger), which needs no tables and
// O(1) expected time per draw. z = 0 degenerates to uniform.
class zipf_sampler {
 public:
  zipf_sampler(std::uint64_t n, double z);

  template <class Rng>
  std::uint64_t operator()(Rng& rng) const {
    if (uniform_) return std::uniform_int_distribution<std::uint64_t>(0, n_ - 1)(rng);
    for (;;) {
      const double u = h_n_ + std::generate_canonical<double, 53>(rng) * (h_x1_ - h_n_);
      const double x = h_integral_inverse(u);
      double k = static_cast<double>(static_cast<std::int64_t>(x + 0.5));
      if (k < 1) k = 1;
      if (k > static_cast<double>(n_)) k = static_cast<double>(n_);
      if (k - x <= s_ || u >= h_integral(k + 0.5) - h(k))
        return static_cast<std::uint64_t>(k) - 1;
    }
  }

  std::uint64_t n() const noexcept { return n_; }
  double z() const noexcept { return z_; }

 private:
  double h(double x) const;
  double h_integral(double x) const;
  double h_integral_inverse(double x) const;

  std::uint64_t n_;
  double z_;
  bool uniform_;
  double h_x1_ = 0, h_n_ = 0, s_ = 0;
};

}  // namespace bigatomic::bench
