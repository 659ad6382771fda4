#include "ecomplex/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ecomplex::kernels::scalar {
namespace {

double fold(const double (&acc)[4]) { return (acc[0] + acc[1]) + (acc[2] + acc[3]); }

double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t j = 0; j < 4; ++j) acc[j] += x[i + j];
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += x[i];
  return fold(acc);
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t j = 0; j < 4; ++j) acc[j] += x[i + j] * y[i + j];
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += x[i] * y[i];
  return fold(acc);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
  return m;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

}  // namespace

const Table kTable{&sum, &dot, &axpy, &scale, &max_abs_diff, &gemv};

}  // namespace ecomplex::kernels::scalar
