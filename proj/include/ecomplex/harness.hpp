#pragma once

// Synthetic economies and independent reference computations. Nothing here
// calls the production solvers or the SIMD kernels.

#include <cstdint>
#include <string>
#include <vector>

#include "ecomplex/advantage.hpp"
#include "ecomplex/ingest.hpp"
#include "ecomplex/matrix.hpp"

namespace ecomplex::harness {

struct SynthSpec {
  int m = 0;             ///< regions, >= 2
  int n = 0;             ///< industries, >= 2
  double noise = 0.0;    ///< per-cell flip probability in [0, 1]
  std::uint64_t seed = 0;

  /// Throws Error(InvalidArgument) when out of range.
  void validate() const;
};

/// Counter-based SplitMix64 stream. The state for cell (row, col) at draw
/// generation `attempt` is
///   mix(mix(mix(mix(seed) ^ row) ^ col) ^ attempt)
/// where mix is the SplitMix64 finalizer; successive draws add the golden
/// gamma 0x9E3779B97F4A7C15 to the state and finalize it. Any language with
/// 64-bit unsigned arithmetic reproduces the same stream.
class CellStream {
 public:
  CellStream(std::uint64_t seed, std::uint64_t row, std::uint64_t col, std::uint64_t attempt);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [lo, hi] via the high half of a 64x64 product.
  int integer(int lo, int hi);

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Zero-padded labels ("R01", "I07", ...) so lexicographic order matches
/// index order.
std::vector<std::string> labels(char prefix, int count);

/// Staircase: region p (1-based) holds the first round(n (m - p + 1) / m)
/// industries, rounding halves up. Throws Error(DegenerateShape) when two rows
/// would have the same length.
AdvantageMatrix gen_nested(int m, int n);

/// The gen_nested support with each cell flipped with probability `noise`;
/// present cells get counts uniform in {1..5}. All-zero rows, then all-zero
/// columns, are redrawn with the next attempt number until none remain; after
/// 64 attempts the staircase cell of the line is forced present.
CountMatrix gen_noisy_nested(const SynthSpec& spec);

struct EigenDecomposition {
  std::vector<double> values;      ///< real parts, descending
  std::vector<double> imag;        ///< imaginary parts, same order
  Matrix<double> vectors;          ///< column j: unit eigenvector (real part)
};

inline constexpr std::size_t kOracleMaxDim = 8;

/// All eigenpairs of a general square matrix through Eigen's real Schur
/// solver in long double. Throws Error(DimensionTooLarge) above 8.
EigenDecomposition eigen_oracle(const Matrix<double>& a);

struct OlsOracleResult {
  std::vector<double> beta;
  std::vector<double> std_error;
  std::vector<double> residuals;
};

/// Normal equations (X'X) b = X'y solved through an explicit Gauss-Jordan
/// inverse in long double. X is n x k row-major. Throws Error(Singular).
OlsOracleResult ols_oracle(const std::vector<double>& y, const Matrix<double>& x);

}  // namespace ecomplex::harness
