#include <algorithm>
#include <cmath>

#include "flpbd/kernels.hpp"

namespace flpbd::kernels::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t blocked = n - n % 4;
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < blocked; k += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double prod = a[k + l] * b[k + l];
      s[l] = s[l] + prod;
    }
  }
  double total = (s[0] + s[2]) + (s[1] + s[3]);
  for (std::size_t k = blocked; k < n; ++k) {
    const double prod = a[k] * b[k];
    total = total + prod;
  }
  return total;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) best = std::max(best, std::abs(a[k] - b[k]));
  return best;
}

void mix_rows(std::span<const double> matrix, std::span<const double> x,
              std::span<const double> divisor, std::span<double> out) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = dot(matrix.subspan(r * cols, cols), x) / divisor[r];
  }
}

void accumulate_flags(double alpha, std::span<const std::uint8_t> flags,
                      std::span<double> acc) {
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const double term = alpha * static_cast<double>(flags[k]);
    acc[k] = acc[k] + term;
  }
}

}  // namespace flpbd::kernels::scalar
