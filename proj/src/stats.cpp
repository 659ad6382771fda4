#include "ecomplex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecomplex/error.hpp"
#include "ecomplex/kernels.hpp"

namespace ecomplex {
namespace {

// Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 10'000;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NotConvergedError(kMaxIter, 0.0);
}

std::vector<std::pair<double, double>> complete_pairs(std::span<const std::optional<double>> x,
                                                      std::span<const std::optional<double>> y) {
  if (x.size() != y.size()) throw Error(Errc::InvalidArgument, "pearson: vectors differ in length");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] && y[i]) out.emplace_back(*x[i], *y[i]);
  return out;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(Errc::InvalidArgument, "incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::InvalidArgument, "incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

int stars(double p) noexcept {
  if (p <= 0.01) return 3;
  if (p <= 0.05) return 2;
  if (p <= 0.1) return 1;
  return 0;
}

std::string star_string(double p) { return std::string(static_cast<std::size_t>(stars(p)), '*'); }

PearsonResult pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
  const auto pairs = complete_pairs(x, y);
  const std::size_t n = pairs.size();
  if (n < 3)
    throw Error(Errc::InsufficientData, "pearson needs at least 3 complete pairs, got " + std::to_string(n));
  std::vector<double> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = pairs[i].first;
    dy[i] = pairs[i].second;
  }
  const double mx = kernels::sum(dx) / static_cast<double>(n);
  const double my = kernels::sum(dy) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] -= mx;
    dy[i] -= my;
  }
  const double sxx = kernels::dot(dx, dx), syy = kernels::dot(dy, dy), sxy = kernels::dot(dx, dy);
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ConstantInput, "pearson: an input is constant");

  PearsonResult out;
  out.n = n;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus = 1.0 - out.r * out.r;
  out.p = one_minus <= 0.0 ? 0.0 : student_t_two_sided(out.r * std::sqrt(df / one_minus), df);
  return out;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  OptionalVector ox(x.begin(), x.end()), oy(y.begin(), y.end());
  return pearson(ox, oy);
}

OptionalVector rank(std::span<const std::optional<double>> values) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i]) idx.push_back(i);
  if (idx.empty()) throw Error(Errc::EmptyInput, "rank: no values present");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return *values[a] > *values[b]; });

  OptionalVector out(values.size());
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t end = start;
    while (end + 1 < idx.size() && *values[idx[end + 1]] == *values[idx[start]]) ++end;
    const double shared = 0.5 * static_cast<double>(start + end) + 1.0;
    for (std::size_t k = start; k <= end; ++k) out[idx[k]] = shared;
    start = end + 1;
  }
  return out;
}

OptionalVector rank(std::span<const double> values) {
  OptionalVector v(values.begin(), values.end());
  return rank(v);
}

RankEvolution rank_evolution(std::span<const ComplexityScores> scores_by_year, std::string_view metric) {
  if (scores_by_year.size() < 2)
    throw Error(Errc::InsufficientYears, "rank evolution needs at least two years, got " +
                                             std::to_string(scores_by_year.size()));
  std::vector<const ComplexityScores*> sorted;
  for (const auto& s : scores_by_year) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->year < b->year; });

  RankEvolution out;
  out.metric = std::string(metric);
  std::set<std::string> regions;
  for (auto* s : sorted) {
    out.years.push_back(s->year);
    regions.insert(s->regions.begin(), s->regions.end());
  }
  out.regions.assign(regions.begin(), regions.end());
  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < out.regions.size(); ++r) row_of[out.regions[r]] = r;
  out.ranks.assign(out.regions.size(), OptionalVector(sorted.size()));

  for (std::size_t y = 0; y < sorted.size(); ++y) {
    const auto values = sorted[y]->region_metric(metric);
    const auto ranks = rank(values);
    for (std::size_t p = 0; p < values.size(); ++p) out.ranks[row_of[sorted[y]->regions[p]]][y] = ranks[p];
  }
  OptionalVector first(out.regions.size()), last(out.regions.size());
  for (std::size_t r = 0; r < out.regions.size(); ++r) {
    first[r] = out.ranks[r].front();
    last[r] = out.ranks[r].back();
  }
  out.endpoint = pearson(first, last);
  return out;
}

double ricd(double ricu, double ricr) {
  if (!(ricr > 0.0)) throw Error(Errc::NonpositiveDenominator, "RICR must be positive");
  return ricu / ricr;
}

void MetricTable::set(const RowKey& key, std::string_view column, std::optional<double> value) {
  if (value && !std::isfinite(*value))
    throw Error(Errc::InvalidValue, "non-finite value in column '" + std::string(column) + "' for (" + key.region +
                                        ", " + std::to_string(key.year) + ")");
  auto& row = rows_[key];
  auto it = row.find(column);
  if (it == row.end())
    row.emplace(std::string(column), value);
  else
    it->second = value;
  if (!has_column(column)) columns_.emplace(column);
}

std::optional<double> MetricTable::get(const RowKey& key, std::string_view column) const {
  auto row = rows_.find(key);
  if (row == rows_.end()) return std::nullopt;
  auto it = row->second.find(column);
  return it == row->second.end() ? std::nullopt : it->second;
}

std::vector<RowKey> MetricTable::keys() const {
  std::vector<RowKey> out;
  out.reserve(rows_.size());
  for (const auto& [k, v] : rows_) out.push_back(k);
  return out;
}

OptionalVector MetricTable::column(std::string_view name) const {
  OptionalVector out;
  out.reserve(rows_.size());
  for (const auto& [k, row] : rows_) {
    auto it = row.find(name);
    out.push_back(it == row.end() ? std::nullopt : it->second);
  }
  return out;
}

MetricTable average_window(const MetricTable& table, std::span<const std::string> columns, int year_from,
                           int year_to) {
  if (year_from > year_to) throw Error(Errc::InvalidArgument, "window start after window end");
  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::string, std::map<std::string, Acc>> acc;
  for (const auto& key : table.keys()) {
    if (key.year < year_from || key.year > year_to) continue;
    auto& region = acc[key.region];
    for (const auto& c : columns) {
      auto& a = region[c];
      if (auto v = table.get(key, c)) {
        a.sum += *v;
        ++a.count;
      }
    }
  }
  MetricTable out;
  for (const auto& [region, cols] : acc)
    for (const auto& [c, a] : cols)
      out.set({region, year_from}, c,
              a.count ? std::optional<double>(a.sum / static_cast<double>(a.count)) : std::nullopt);
  return out;
}

CorrelationMatrix correlation_matrix(const MetricTable& table, std::span<const std::string> columns) {
  if (columns.size() < 2) throw Error(Errc::InvalidArgument, "correlation matrix needs at least two columns");
  for (const auto& c : columns)
    if (!table.has_column(c)) throw Error(Errc::InvalidArgument, "unknown column '" + c + "'");
  CorrelationMatrix out;
  out.columns.assign(columns.begin(), columns.end());
  std::vector<OptionalVector> data;
  for (const auto& c : columns) data.push_back(table.column(c));
  out.cells.assign(columns.size(), std::vector<CorrelationCell>(columns.size()));
  for (std::size_t a = 0; a < columns.size(); ++a)
    for (std::size_t b = a; b < columns.size(); ++b) {
      CorrelationCell cell;
      try {
        cell.result = pearson(data[a], data[b]);
      } catch (const Error& e) {
        cell.error = e.what();
      }
      out.cells[a][b] = cell;
      out.cells[b][a] = cell;
    }
  return out;
}

const Coefficient& RegressionResult::coefficient(std::string_view term) const {
  for (const auto& c : coefficients)
    if (c.term == term) return c;
  throw Error(Errc::InvalidArgument, "no regression term '" + std::string(term) + "'");
}

LeastSquares least_squares(std::span<const std::vector<double>> columns, std::span<const double> y) {
  const std::size_t k = columns.size(), n = y.size();
  for (const auto& c : columns)
    if (c.size() != n) throw Error(Errc::InvalidArgument, "design column length differs from response");
  if (n <= k)
    throw Error(Errc::InsufficientData, std::to_string(n) + " observations for " + std::to_string(k) + " parameters");

  // Householder QR, column-major; a[j][i] is row i of column j.
  std::vector<std::vector<double>> a(columns.begin(), columns.end());
  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> diag(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double original = std::sqrt(kernels::dot(columns[j], columns[j]));
    std::span<double> col(a[j].data() + j, n - j);
    const double norm = std::sqrt(kernels::dot(col, col));
    if (original == 0.0 || norm <= 1e-10 * original)
      throw Error(Errc::RankDeficient, "design column " + std::to_string(j) + " is collinear with earlier columns");
    const double alpha = col[0] > 0.0 ? -norm : norm;
    std::vector<double> v(col.begin(), col.end());
    v[0] -= alpha;
    const double vv = kernels::dot(v, v);
    for (std::size_t l = j + 1; l < k; ++l) {
      std::span<double> target(a[l].data() + j, n - j);
      kernels::axpy(-2.0 * kernels::dot(v, target) / vv, v, target);
    }
    std::span<double> rhs(qty.data() + j, n - j);
    kernels::axpy(-2.0 * kernels::dot(v, rhs) / vv, v, rhs);
    diag[j] = alpha;
  }
  auto r = [&](std::size_t i, std::size_t j) { return i == j ? diag[j] : a[j][i]; };

  LeastSquares out;
  out.beta.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double s = qty[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= r(i, j) * out.beta[j];
    out.beta[i] = s / r(i, i);
  }

  out.residuals.assign(y.begin(), y.end());
  for (std::size_t j = 0; j < k; ++j) kernels::axpy(-out.beta[j], columns[j], out.residuals);
  out.rss = kernels::dot(out.residuals, out.residuals);

  // diag((X'X)^-1) = row norms of R^-1.
  std::vector<std::vector<double>> rinv(k, std::vector<double>(k, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    rinv[c][c] = 1.0 / r(c, c);
    for (std::size_t i = c; i-- > 0;) {
      double s = 0.0;
      for (std::size_t j = i + 1; j <= c; ++j) s += r(i, j) * rinv[j][c];
      rinv[i][c] = -s / r(i, i);
    }
  }
  const double sigma2 = out.rss / static_cast<double>(n - k);
  out.std_error.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t c = i; c < k; ++c) s += rinv[i][c] * rinv[i][c];
    out.std_error[i] = std::sqrt(sigma2 * s);
  }
  return out;
}

RegressionResult ols_fixed_effects(const MetricTable& table, std::string_view dependent,
                                   std::span<const std::string> predictors, bool year_fixed_effects) {
  if (!table.has_column(dependent))
    throw Error(Errc::InvalidArgument, "unknown dependent column '" + std::string(dependent) + "'");
  for (const auto& p : predictors)
    if (!table.has_column(p)) throw Error(Errc::InvalidArgument, "unknown predictor column '" + p + "'");

  std::vector<RowKey> rows;
  std::vector<double> y;
  for (const auto& key : table.keys()) {
    auto dv = table.get(key, dependent);
    if (!dv) continue;
    bool complete = true;
    for (const auto& p : predictors) complete = complete && table.get(key, p).has_value();
    if (!complete) continue;
    rows.push_back(key);
    y.push_back(*dv);
  }

  RegressionResult out;
  out.dependent = std::string(dependent);
  std::set<int> years;
  for (const auto& k : rows) years.insert(k.year);
  out.years.assign(years.begin(), years.end());

  std::vector<std::vector<double>> design;
  std::vector<std::string> terms;
  design.emplace_back(rows.size(), 1.0);
  terms.emplace_back("(intercept)");
  for (const auto& p : predictors) {
    std::vector<double> col;
    for (const auto& k : rows) col.push_back(*table.get(k, p));
    design.push_back(std::move(col));
    terms.push_back(p);
  }
  if (year_fixed_effects)
    for (std::size_t t = 1; t < out.years.size(); ++t) {
      std::vector<double> col;
      for (const auto& k : rows) col.push_back(k.year == out.years[t] ? 1.0 : 0.0);
      design.push_back(std::move(col));
      terms.push_back("year_" + std::to_string(out.years[t]));
    }

  const std::size_t n = rows.size(), k = design.size();
  if (n <= k)
    throw Error(Errc::InsufficientData, std::to_string(n) + " complete observations for " + std::to_string(k) +
                                            " parameters");
  const auto fit = least_squares(design, y);

  const double df = static_cast<double>(n - k);
  for (std::size_t j = 0; j < k; ++j) {
    Coefficient c;
    c.term = terms[j];
    c.estimate = fit.beta[j];
    c.std_error = fit.std_error[j];
    if (c.std_error > 0.0) {
      c.t_stat = c.estimate / c.std_error;
      c.p_value = student_t_two_sided(c.t_stat, df);
    } else {
      c.t_stat = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
      c.p_value = c.estimate == 0.0 ? 1.0 : 0.0;
    }
    c.stars = stars(c.p_value);
    out.coefficients.push_back(c);
  }

  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double tss = 0.0;
  for (double v : y) tss += (v - mean) * (v - mean);
  out.n_observations = n;
  out.n_parameters = k;
  out.r2 = tss > 0.0 ? 1.0 - fit.rss / tss : 1.0;
  out.adjusted_r2 = 1.0 - (1.0 - out.r2) * static_cast<double>(n - 1) / df;
  out.rmse = std::sqrt(fit.rss / static_cast<double>(n));
  return out;
}

}  // namespace ecomplex
