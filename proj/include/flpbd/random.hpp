#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace flpbd {

/// Standard normal cdf, 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);

/// Standard normal quantile for p in (0, 1). Acklam's rational approximation
/// (relative error below 1.2e-9) followed by one Halley step against
/// normal_cdf, which brings the result to near double precision.
/// Returns -inf / +inf at p = 0 / p = 1.
double normal_quantile(double p);

/// Seedable stream with fixed, platform-independent transforms.
///
/// Engine: std::mt19937_64 (the C++ standard fixes its output sequence).
/// uniform():      (x >> 11) * 2^-53, in [0, 1).
/// uniform_open(): ((x >> 11) + 0.5) * 2^-53, in (0, 1).
/// normal():       normal_quantile(uniform_open()), one engine draw per value.
/// below(n):       Lemire's multiply-shift with rejection, unbiased.
/// shuffle():      Fisher-Yates from the back using below().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_quantile(uniform_open()); }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t k = items.size(); k > 1; --k) {
      const auto r = static_cast<std::size_t>(below(k));
      using std::swap;
      swap(items[k - 1], items[r]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent child seeds from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace flpbd
