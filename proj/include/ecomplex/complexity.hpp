#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecomplex/advantage.hpp"
#include "ecomplex/ingest.hpp"
#include "ecomplex/matrix.hpp"

namespace ecomplex {

/// Region-region coupling matrix
///   C(p, p') = (1 / k_{p,0}) * sum_i M(p,i) M(p',i) / k_{i,0}
/// over regions with nonzero diversity. Row-stochastic and similar to a
/// symmetric positive-semidefinite matrix, so its spectrum lies in [0, 1].
struct CouplingMatrix {
  std::vector<std::string> regions;
  Matrix<double> values;
};

/// Zero-diversity regions are left out. Throws Error(EmptyAfterExclusion) if
/// nothing remains.
CouplingMatrix coupling_matrix(const AdvantageMatrix& m);

/// Eigenvalues of the coupling matrix, descending, from the dense solver.
std::vector<double> coupling_spectrum(const AdvantageMatrix& m);

enum class EigenMethod {
  Auto,   ///< dense up to kDenseLimit regions, power iteration above
  Dense,  ///< cyclic Jacobi on the symmetrized matrix
  Power,  ///< deflated power iteration with matrix-free products
};

inline constexpr std::size_t kDenseLimit = 64;
/// Relative size below which the ECI-diversity covariance, or an eigenvector
/// entry in the sign tie-break, is treated as zero.
inline constexpr double kSignTol = 1e-12;

struct EciOptions {
  /// Minimum separation between the second and third eigenvalues.
  double gap_tol = 1e-9;
  EigenMethod method = EigenMethod::Auto;
  double power_tol = 1e-13;
  int power_max_iter = 1'000'000;
};

struct EciResult {
  /// Aligned with the input regions; missing for zero-diversity regions.
  std::vector<std::optional<double>> eci;
  /// Raw eigenvector entries K_p of the coupling matrix (unit norm in the
  /// symmetrized basis, sign fixed together with eci).
  std::vector<std::optional<double>> k;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  EigenMethod method = EigenMethod::Dense;
};

/// Economic complexity index: the eigenvector of the coupling matrix for its
/// second-largest eigenvalue, standardized to mean 0 and population standard
/// deviation 1. Its sign makes the correlation with diversity nonnegative; if
/// that correlation is zero (within kSignTol) the most diverse region gets
/// K >= 0.
///
/// Throws DisconnectedNetworkError when the bipartite graph has more than one
/// component, and Error(DegenerateSpectrum) when the second eigenvalue is not
/// separated from the third by gap_tol or the eigenvector is constant.
EciResult eci(const AdvantageMatrix& m, const EciOptions& options = {});

struct FitnessOptions {
  double tol = 1e-10;
  int max_iter = 10'000;
  /// Value of the constant starting vectors F(0) and Q(0).
  double initial = 1.0;
};

struct FitnessResult {
  std::vector<std::optional<double>> fitness;     ///< per region, mean 1
  std::vector<std::optional<double>> complexity;  ///< per industry, mean 1
  int iterations = 0;
  double residual = 0.0;
};

/// Fitness-complexity fixed point. Each step computes
///   F~_p = sum_i M(p,i) Q_i
///   Q~_i = 1 / sum_p M(p,i) / F_p
/// from the previous (F, Q), then divides each by its mean. Stops when the
/// L-infinity change of both normalized vectors drops below tol.
///
/// Throws NotConvergedError after max_iter steps and
/// Error(NumericalUnderflow) if a value reaches zero or leaves the finite
/// range. Zero-diversity regions and zero-ubiquity industries are missing.
FitnessResult fitness(const AdvantageMatrix& m, const FitnessOptions& options = {});

/// Shannon entropy (nats) of each region's firm counts over its advantaged
/// industries. Missing for regions without advantaged firms. Labels of
/// `counts` must cover those of `m`.
std::vector<std::optional<double>> entropy(const CountMatrix& counts, const AdvantageMatrix& m);

struct ScoreOptions {
  double threshold = 1.0;
  EciOptions eci;
  FitnessOptions fitness;
};

/// Everything computed for one year.
struct ComplexityScores {
  int year = 0;
  std::vector<std::string> regions;
  std::vector<std::string> industries;
  std::vector<std::optional<double>> eci;
  std::vector<std::optional<double>> fitness;
  std::vector<int> diversity;
  std::vector<std::optional<double>> entropy;
  std::vector<std::optional<double>> avg_ubiquity;
  std::vector<std::optional<double>> q_complexity;
  std::vector<int> ubiquity;
  int iterations_used = 0;
  double fitness_residual = 0.0;
  double lambda2 = 0.0;
  std::vector<std::string> dropped_regions;
  std::vector<std::string> dropped_industries;
  ScoreOptions options;

  /// Per-region column by name: eci, fitness, diversity, entropy,
  /// avg_ubiquity. Throws Error(InvalidArgument) for other names.
  std::vector<std::optional<double>> region_metric(std::string_view name) const;
};

/// prune -> rca -> binarize -> eci, fitness, entropy.
ComplexityScores compute_scores(const CountMatrix& counts, const ScoreOptions& options = {});

}  // namespace ecomplex
