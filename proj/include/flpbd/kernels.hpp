#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// Every kernel defines its floating-point evaluation order so that both
// variants return bit-identical results:
//  * dot products use four interleaved partial sums (lane l accumulates the
//    indices k = l mod 4 of the leading multiple-of-four block), combined as
//    (s0 + s2) + (s1 + s3), followed by a sequential tail;
//  * products and sums are separate roundings (no fused multiply-add);
//  * max reductions are order independent.
// Scenario sampling relies on this to stay reproducible across machines.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace flpbd::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend b);

/// True when the running CPU (and this build) can execute the backend.
bool backend_supported(Backend b);

/// Backend used by the dispatching entry points. Defaults to the best
/// supported one; FLPBD_SIMD=scalar in the environment forces the reference.
Backend active_backend();

/// Overrides the dispatch choice. Throws std::invalid_argument if unsupported.
void set_backend(Backend b);

/// Sum of a[k] * b[k] in the blocked order above.
double dot(std::span<const double> a, std::span<const double> b);

/// max_k |a[k] - b[k]|, 0 for empty input.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// out[r] = dot(row r of `matrix`, x) / divisor[r]; `matrix` is row-major
/// with x.size() columns.
void mix_rows(std::span<const double> matrix, std::span<const double> x,
              std::span<const double> divisor, std::span<double> out);

/// acc[k] += alpha * flags[k] for 0/1 flags.
void accumulate_flags(double alpha, std::span<const std::uint8_t> flags,
                      std::span<double> acc);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
void mix_rows(std::span<const double> matrix, std::span<const double> x,
              std::span<const double> divisor, std::span<double> out);
void accumulate_flags(double alpha, std::span<const std::uint8_t> flags,
                      std::span<double> acc);
}  // namespace scalar

#if defined(FLPBD_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
void mix_rows(std::span<const double> matrix, std::span<const double> x,
              std::span<const double> divisor, std::span<double> out);
void accumulate_flags(double alpha, std::span<const std::uint8_t> flags,
                      std::span<double> acc);
}  // namespace avx2
#endif

}  // namespace flpbd::kernels
