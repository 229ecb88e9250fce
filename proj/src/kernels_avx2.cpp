// Compiled with -mavx2 (without -mfma); only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "flpbd/kernels.hpp"

namespace flpbd::kernels::avx2 {
namespace {

inline double combine_lanes(__m256d acc) {
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  return (s[0] + s[2]) + (s[1] + s[3]);
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t blocked = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < blocked; k += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a.data() + k),
                                       _mm256_loadu_pd(b.data() + k));
    acc = _mm256_add_pd(acc, prod);
  }
  double total = combine_lanes(acc);
  for (std::size_t k = blocked; k < n; ++k) {
    const double prod = a[k] * b[k];
    total = total + prod;
  }
  return total;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t blocked = n - n % 4;
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_setzero_pd();
  for (std::size_t k = 0; k < blocked; k += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a.data() + k),
                                       _mm256_loadu_pd(b.data() + k));
    best = _mm256_max_pd(best, _mm256_andnot_pd(sign_mask, diff));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (std::size_t k = blocked; k < n; ++k) result = std::max(result, std::abs(a[k] - b[k]));
  return result;
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
  const std::size_t n = acc.size();
  const std::size_t blocked = n - n % 4;
  const __m256d a = _mm256_set1_pd(alpha);
  for (std::size_t k = 0; k < blocked; k += 4) {
    int packed;
    std::copy_n(flags.data() + k, 4, reinterpret_cast<std::uint8_t*>(&packed));
    const __m128i bytes = _mm_cvtsi32_si128(packed);
    const __m256d f = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(bytes));
    const __m256d sum = _mm256_add_pd(_mm256_loadu_pd(acc.data() + k), _mm256_mul_pd(a, f));
    _mm256_storeu_pd(acc.data() + k, sum);
  }
  for (std::size_t k = blocked; k < n; ++k) {
    const double term = alpha * static_cast<double>(flags[k]);
    acc[k] = acc[k] + term;
  }
}

}  // namespace flpbd::kernels::avx2
