#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecomplex/complexity.hpp"

namespace ecomplex {

using OptionalVector = std::vector<std::optional<double>>;

// Distributions

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// P(|T| >= |t|).
double student_t_two_sided(double t, double df);

/// Significance stars: 3 for p <= 0.01, 2 for p <= 0.05, 1 for p <= 0.1,
/// else 0. Each boundary belongs to the stricter level.
int stars(double p) noexcept;
std::string star_string(double p);

// Correlation and ranking

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// Pairs with a missing side are dropped first. Throws
/// Error(InsufficientData) below three pairs and Error(ConstantInput) if
/// either side is constant.
PearsonResult pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y);
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// Descending ranks, 1 = largest; ties share the mean of the ranks they
/// cover. Missing stays missing. Throws Error(EmptyInput) when nothing is
/// present.
OptionalVector rank(std::span<const std::optional<double>> values);
OptionalVector rank(std::span<const double> values);

struct RankEvolution {
  std::string metric;
  std::vector<int> years;
  std::vector<std::string> regions;  ///< union over years, sorted
  /// ranks[region][year index]
  std::vector<OptionalVector> ranks;
  /// First-year ranks against last-year ranks over regions present in both.
  PearsonResult endpoint;
};

/// Throws Error(InsufficientYears) for fewer than two years.
RankEvolution rank_evolution(std::span<const ComplexityScores> scores_by_year, std::string_view metric);

/// Urban-to-rural relative income ratio. Throws
/// Error(NonpositiveDenominator) unless ricr > 0.
double ricd(double ricu, double ricr);

// Tables

struct RowKey {
  std::string region;
  int year = 0;
  auto operator<=>(const RowKey&) const = default;
};

/// Region-year table of named numeric columns; absent cells are missing.
class MetricTable {
 public:
  /// Throws Error(InvalidValue) for a non-finite value.
  void set(const RowKey& key, std::string_view column, std::optional<double> value);
  std::optional<double> get(const RowKey& key, std::string_view column) const;

  std::vector<RowKey> keys() const;
  const std::set<std::string, std::less<>>& columns() const noexcept { return columns_; }
  bool has_column(std::string_view name) const { return columns_.find(name) != columns_.end(); }
  /// Values aligned with keys().
  OptionalVector column(std::string_view name) const;
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  std::map<RowKey, std::map<std::string, std::optional<double>, std::less<>>> rows_;
  std::set<std::string, std::less<>> columns_;
};

/// Per-region means over [year_from, year_to] of the present values. Output
/// rows are keyed (region, year_from).
MetricTable average_window(const MetricTable& table, std::span<const std::string> columns, int year_from,
                           int year_to);

struct CorrelationCell {
  std::optional<PearsonResult> result;
  std::string error;  ///< set when result is absent
};

struct CorrelationMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<CorrelationCell>> cells;
};

/// Pairwise Pearson with pairwise deletion. A failing cell carries the error
/// text instead of a result. Throws Error(InvalidArgument) for fewer than two
/// columns or an unknown column.
CorrelationMatrix correlation_matrix(const MetricTable& table, std::span<const std::string> columns);

// Regression

struct Coefficient {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  int stars = 0;
};

struct RegressionResult {
  std::string dependent;
  std::vector<Coefficient> coefficients;  ///< intercept, predictors, year dummies
  std::size_t n_observations = 0;
  std::size_t n_parameters = 0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double rmse = 0.0;  ///< sqrt(RSS / n)
  std::vector<int> years;

  const Coefficient& coefficient(std::string_view term) const;
};

/// OLS of `dependent` on an intercept, `predictors` and, when
/// `year_fixed_effects` is set, one indicator per year after the first.
/// Rows missing any used column are dropped. Classical standard errors.
/// Throws Error(InsufficientData) unless n exceeds the parameter count and
/// Error(RankDeficient) for a collinear design.
RegressionResult ols_fixed_effects(const MetricTable& table, std::string_view dependent,
                                   std::span<const std::string> predictors, bool year_fixed_effects = true);

/// Least squares on an explicit design (column-major, one span per column).
/// Used by ols_fixed_effects; exposed for tests.
struct LeastSquares {
  std::vector<double> beta;
  std::vector<double> std_error;
  std::vector<double> residuals;
  double rss = 0.0;
};
LeastSquares least_squares(std::span<const std::vector<double>> columns, std::span<const double> y);

}  // namespace ecomplex
