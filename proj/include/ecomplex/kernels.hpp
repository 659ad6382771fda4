#pragma once

// Data-parallel inner loops shared by the solvers.
//
// Every reduction uses the same four-lane striped order: element i is added
// to lane i % 4 and the lanes are folded as (l0 + l1) + (l2 + l3). The scalar
// reference, AVX2 and NEON variants follow that order exactly and never fuse
// multiply-add, so all variants return bit-identical results. Dispatch picks
// the widest variant the CPU supports; ECOMPLEX_SIMD=scalar|avx2|neon
// overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace ecomplex::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

/// True if the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Switch the process-wide variant. Throws Error(InvalidArgument) if the
/// variant is unavailable.
void set_isa(Isa isa);

/// Function table for one variant. Lengths are element counts.
struct Table {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double* x, double a, std::size_t n);
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  /// y = A x for a row-major rows x cols matrix.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const Table& table(Isa isa);

namespace scalar {
extern const Table kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Table kTable;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const Table kTable;
}
#endif

// Dispatched entry points.

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double a);
double max_abs_diff(std::span<const double> x, std::span<const double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);

}  // namespace ecomplex::kernels
