#pragma once
// Shared scalar and RNG utilities for the superint toolkit.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace superint {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// splitmix64: cheap, well-mixed 64-bit hash used to derive independent
// child seeds from a base seed plus a label, so that verification runs
// are reproducible no matter in which order sub-checks execute.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  std::uint64_t h = base ^ 0x517cc1b727220a95ULL;
  for (unsigned char ch : label) h = splitmix64(h ^ ch);
  return splitmix64(h ^ base);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(eng_);
  }

  // Generic sample point component: magnitude in [0.5, 1.5], phase uniform.
  cplx annulus(double rlo = 0.5, double rhi = 1.5) {
    const double m = uniform(rlo, rhi);
    const double ph = uniform(0.0, 2.0 * kPi);
    return cplx(m * std::cos(ph), m * std::sin(ph));
  }

  // Real counterpart: magnitude in [0.5, 1.5] with random sign.
  double real_annulus(double rlo = 0.5, double rhi = 1.5) {
    const double m = uniform(rlo, rhi);
    return uniform(0.0, 1.0) < 0.5 ? -m : m;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Pochhammer symbol (x)_n = x (x+1) ... (x+n-1).
inline cplx pochhammer(cplx x, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= (x + cplx(double(i), 0.0));
  return r;
}

struct EvalDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace superint
