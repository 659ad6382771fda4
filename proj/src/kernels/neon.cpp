// AArch64 variant. Two float64x2 registers hold lanes {0,1} and {2,3} so the
// accumulation order matches the four-lane scalar reference.

#include "ecomplex/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace ecomplex::kernels::neon {
namespace {

double fold(float64x2_t lo, float64x2_t hi, std::size_t i, std::size_t n, const double* x,
            const double* y) {
  double acc[4];
  vst1q_f64(acc, lo);
  vst1q_f64(acc + 2, hi);
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += y ? x[i] * y[i] : x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  return fold(lo, hi, i, n, x, nullptr);
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  return fold(lo, hi, i, n, x, y);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double out = std::max(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; i < n; ++i) out = std::max(out, std::fabs(x[i] - y[i]));
  return out;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

}  // namespace

const Table kTable{&sum, &dot, &axpy, &scale, &max_abs_diff, &gemv};

}  // namespace ecomplex::kernels::neon

#endif
