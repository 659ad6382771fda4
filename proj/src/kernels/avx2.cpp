// Compiled with -mavx2 only; the dispatcher calls into this file after a
// runtime CPU check. No -mfma: products are rounded before accumulation.

#include "ecomplex/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace ecomplex::kernels::avx2 {
namespace {

double fold(__m256d v, std::size_t i, std::size_t n, const double* x, const double* y) {
  alignas(32) double acc[4];
  _mm256_store_pd(acc, v);
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += y ? x[i] * y[i] : x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  return fold(acc, i, n, x, nullptr);
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  return fold(acc, i, n, x, y);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) out = std::max(out, std::fabs(x[i] - y[i]));
  return out;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

}  // namespace

const Table kTable{&sum, &dot, &axpy, &scale, &max_abs_diff, &gemv};

}  // namespace ecomplex::kernels::avx2
