#include "ecomplex/harness.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ecomplex/error.hpp"

namespace ecomplex::harness {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr int kMaxAttempts = 64;

int staircase_length(int m, int n, int p) {
  // round-half-up of n (m - p) / m for 0-based p, in exact integer arithmetic
  return (2 * n * (m - p) + m) / (2 * m);
}

}  // namespace

void SynthSpec::validate() const {
  if (m < 2 || n < 2) throw Error(Errc::InvalidArgument, "synthetic economy needs m >= 2 and n >= 2");
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(Errc::InvalidArgument, "noise must lie in [0, 1]");
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CellStream::CellStream(std::uint64_t seed, std::uint64_t row, std::uint64_t col, std::uint64_t attempt)
    : state_(mix64(mix64(mix64(mix64(seed) ^ row) ^ col) ^ attempt)) {}

std::uint64_t CellStream::next() {
  state_ += kGamma;
  return mix64(state_);
}

double CellStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int CellStream::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  const auto hi64 = static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * span) >> 64);
  return lo + static_cast<int>(hi64);
}

std::vector<std::string> labels(char prefix, int count) {
  const int width = std::max(2, static_cast<int>(std::to_string(count).size()));
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) {
    auto digits = std::to_string(i);
    out.push_back(prefix + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits);
  }
  return out;
}

AdvantageMatrix gen_nested(int m, int n) {
  if (m < 2 || n < 2) throw Error(Errc::InvalidArgument, "gen_nested needs m >= 2 and n >= 2");
  Matrix<std::uint8_t> entries(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  int previous = n + 1;
  for (int p = 0; p < m; ++p) {
    const int len = staircase_length(m, n, p);
    if (len >= previous)
      throw Error(Errc::DegenerateShape, "staircase rows " + std::to_string(p) + " and " + std::to_string(p + 1) +
                                             " both have length " + std::to_string(len));
    previous = len;
    for (int i = 0; i < len; ++i) entries(p, i) = 1;
  }
  return AdvantageMatrix::from_entries(labels('R', m), labels('I', n), std::move(entries));
}

CountMatrix gen_noisy_nested(const SynthSpec& spec) {
  spec.validate();
  const auto m = static_cast<std::size_t>(spec.m), n = static_cast<std::size_t>(spec.n);
  std::vector<int> row_attempt(m, 0), col_attempt(n, 0), length(m);
  for (std::size_t p = 0; p < m; ++p) length[p] = staircase_length(spec.m, spec.n, static_cast<int>(p));

  CountMatrix out;
  out.regions = labels('R', spec.m);
  out.industries = labels('I', spec.n);
  out.counts = Matrix<std::int64_t>(m, n);

  auto draw = [&](std::size_t p, std::size_t i) {
    const int attempt = row_attempt[p] + col_attempt[i];
    CellStream s(spec.seed, p, i, static_cast<std::uint64_t>(attempt));
    bool present = static_cast<int>(i) < length[p];
    if (s.uniform() < spec.noise) present = !present;
    const int count = s.integer(1, 5);
    if (attempt >= kMaxAttempts && static_cast<int>(i) < std::max(length[p], 1)) present = true;
    out.counts(p, i) = present ? count : 0;
  };
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n; ++i) draw(p, i);

  for (;;) {
    bool changed = false;
    for (std::size_t p = 0; p < m; ++p) {
      auto row = out.counts.row(p);
      if (std::all_of(row.begin(), row.end(), [](auto v) { return v == 0; })) {
        ++row_attempt[p];
        for (std::size_t i = 0; i < n; ++i) draw(p, i);
        changed = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      bool empty = true;
      for (std::size_t p = 0; p < m && empty; ++p) empty = out.counts(p, i) == 0;
      if (empty) {
        ++col_attempt[i];
        for (std::size_t p = 0; p < m; ++p) draw(p, i);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

EigenDecomposition eigen_oracle(const Matrix<double>& a) {
  if (a.rows() != a.cols()) throw Error(Errc::InvalidArgument, "eigen_oracle needs a square matrix");
  if (a.rows() > kOracleMaxDim)
    throw Error(Errc::DimensionTooLarge, "eigen_oracle handles at most 8x8, got " + std::to_string(a.rows()));
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(a.rows());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

  Eigen::EigenSolver<Mat> solver(m, true);
  if (solver.info() != Eigen::Success) throw Error(Errc::NotConverged, "eigen_oracle: Schur iteration failed");
  const auto values = solver.eigenvalues();
  const auto vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return values(x).real() > values(y).real(); });

  EigenDecomposition out;
  out.vectors = Matrix<double>(a.rows(), a.rows());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto col = order[j];
    out.values.push_back(static_cast<double>(values(col).real()));
    out.imag.push_back(static_cast<double>(values(col).imag()));
    long double norm = 0;
    for (Eigen::Index i = 0; i < n; ++i) norm += vectors(i, col).real() * vectors(i, col).real();
    norm = std::sqrt(norm);
    for (Eigen::Index i = 0; i < n; ++i)
      out.vectors(static_cast<std::size_t>(i), j) =
          static_cast<double>(norm > 0 ? vectors(i, col).real() / norm : 0.0L);
  }
  return out;
}

OlsOracleResult ols_oracle(const std::vector<double>& y, const Matrix<double>& x) {
  const std::size_t n = x.rows(), k = x.cols();
  if (y.size() != n) throw Error(Errc::InvalidArgument, "ols_oracle: response length differs from design rows");
  if (n <= k) throw Error(Errc::InsufficientData, "ols_oracle: need more rows than columns");

  // Augmented [X'X | I] reduced to [I | (X'X)^-1].
  std::vector<std::vector<long double>> g(k, std::vector<long double>(2 * k, 0.0L));
  std::vector<long double> xty(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t r = 0; r < n; ++r) g[a][b] += static_cast<long double>(x(r, a)) * x(r, b);
    for (std::size_t r = 0; r < n; ++r) xty[a] += static_cast<long double>(x(r, a)) * y[r];
    g[a][k + a] = 1.0L;
  }
  long double scale = 0.0L;
  for (std::size_t a = 0; a < k; ++a) scale = std::max(scale, std::fabs(g[a][a]));
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::fabs(g[r][c]) > std::fabs(g[pivot][c])) pivot = r;
    if (std::fabs(g[pivot][c]) <= 1e-14L * scale) throw Error(Errc::Singular, "ols_oracle: X'X is singular");
    std::swap(g[c], g[pivot]);
    const long double inv = 1.0L / g[c][c];
    for (auto& v : g[c]) v *= inv;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c || g[r][c] == 0.0L) continue;
      const long double f = g[r][c];
      for (std::size_t j = 0; j < 2 * k; ++j) g[r][j] -= f * g[c][j];
    }
  }

  OlsOracleResult out;
  std::vector<long double> beta(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) beta[a] += g[a][k + b] * xty[b];
  long double rss = 0.0L;
  for (std::size_t r = 0; r < n; ++r) {
    long double fit = 0.0L;
    for (std::size_t a = 0; a < k; ++a) fit += beta[a] * x(r, a);
    const long double e = y[r] - fit;
    out.residuals.push_back(static_cast<double>(e));
    rss += e * e;
  }
  const long double sigma2 = rss / static_cast<long double>(n - k);
  for (std::size_t a = 0; a < k; ++a) {
    out.beta.push_back(static_cast<double>(beta[a]));
    out.std_error.push_back(static_cast<double>(std::sqrt(sigma2 * g[a][k + a])));
  }
  return out;
}

}  // namespace ecomplex::harness
