#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "flpbd/kernels.hpp"

namespace flpbd::kernels {
namespace {

Backend detect() {
  if (const char* env = std::getenv("FLPBD_SIMD"); env && std::string(env) == "scalar") {
    return Backend::kScalar;
  }
  return backend_supported(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

std::string_view backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

bool backend_supported(Backend b) {
  if (b == Backend::kScalar) return true;
#if defined(FLPBD_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument("SIMD backend " + std::string(backend_name(b)) +
                                " is not supported here");
  }
  current().store(b, std::memory_order_relaxed);
}

#if defined(FLPBD_HAVE_AVX2)
#define FLPBD_DISPATCH(fn, ...)                                      \
  (active_backend() == Backend::kAvx2 ? avx2::fn(__VA_ARGS__)        \
                                      : scalar::fn(__VA_ARGS__))
#else
#define FLPBD_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  return FLPBD_DISPATCH(dot, a, b);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return FLPBD_DISPATCH(max_abs_diff, a, b);
}

void mix_rows(std::span<const double> matrix, std::span<const double> x,
              std::span<const double> divisor, std::span<double> out) {
  FLPBD_DISPATCH(mix_rows, matrix, x, divisor, out);
}

void accumulate_flags(double alpha, std::span<const std::uint8_t> flags,
                      std::span<double> acc) {
  FLPBD_DISPATCH(accumulate_flags, alpha, flags, acc);
}

#undef FLPBD_DISPATCH

}  // namespace flpbd::kernels
