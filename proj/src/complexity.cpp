#include "ecomplex/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "ecomplex/error.hpp"
#include "ecomplex/kernels.hpp"

namespace ecomplex {
namespace {

/// The advantage matrix restricted to regions and industries with nonzero
/// degree, stored densely in both orientations for the kernels.
struct Network {
  std::vector<std::size_t> region_index;    // into the input regions
  std::vector<std::size_t> industry_index;  // into the input industries
  Matrix<double> rows;                      // m x n, M(p,i)
  Matrix<double> cols;                      // n x m, transpose
  std::vector<double> diversity;
  std::vector<double> ubiquity;

  std::size_t m() const { return region_index.size(); }
  std::size_t n() const { return industry_index.size(); }
};

Network restrict(const AdvantageMatrix& adv) {
  Network net;
  for (std::size_t p = 0; p < adv.regions.size(); ++p)
    if (adv.diversity[p] > 0) net.region_index.push_back(p);
  for (std::size_t i = 0; i < adv.industries.size(); ++i)
    if (adv.ubiquity[i] > 0) net.industry_index.push_back(i);
  if (net.region_index.empty())
    throw Error(Errc::EmptyAfterExclusion, "no region has comparative advantage in any industry");

  net.rows = Matrix<double>(net.m(), net.n());
  for (std::size_t r = 0; r < net.m(); ++r)
    for (std::size_t c = 0; c < net.n(); ++c)
      net.rows(r, c) = adv.entries(net.region_index[r], net.industry_index[c]);
  net.cols = net.rows.transposed();
  for (auto p : net.region_index) net.diversity.push_back(adv.diversity[p]);
  for (auto i : net.industry_index) net.ubiquity.push_back(adv.ubiquity[i]);
  return net;
}

/// A(p,p') = sum_i M(p,i) M(p',i) / k_i, symmetric.
Matrix<double> inverse_ubiquity_overlap(const Network& net) {
  Matrix<double> weighted(net.m(), net.n());
  for (std::size_t r = 0; r < net.m(); ++r)
    for (std::size_t c = 0; c < net.n(); ++c) weighted(r, c) = net.rows(r, c) / net.ubiquity[c];
  Matrix<double> a(net.m(), net.m());
  for (std::size_t p = 0; p < net.m(); ++p)
    for (std::size_t q = p; q < net.m(); ++q) a(p, q) = a(q, p) = kernels::dot(weighted.row(p), net.rows.row(q));
  return a;
}

struct Union {
  std::vector<std::size_t> parent;
  explicit Union(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

void require_connected(const Network& net, const AdvantageMatrix& adv) {
  // Regions occupy [0, m), industries [m, m + n).
  Union u(net.m() + net.n());
  for (std::size_t r = 0; r < net.m(); ++r)
    for (std::size_t c = 0; c < net.n(); ++c)
      if (net.rows(r, c) != 0.0) u.join(r, net.m() + c);
  std::vector<std::vector<std::string>> components;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t r = 0; r < net.m(); ++r) {
    auto [it, inserted] = slot.emplace(u.find(r), components.size());
    if (inserted) components.emplace_back();
    components[it->second].push_back(adv.regions[net.region_index[r]]);
  }
  if (components.size() > 1) throw DisconnectedNetworkError(std::move(components));
}

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix<double> vectors;      // column j pairs with values[j]
};

/// Cyclic Jacobi rotations for a symmetric matrix.
EigenPairs jacobi_eigen(Matrix<double> a) {
  const std::size_t n = a.rows();
  Matrix<double> v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale += a(i, j) * a(i, j);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * scale) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  EigenPairs out{std::vector<double>(n), Matrix<double>(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

/// S = D^{-1/2} A D^{-1/2}, similar to the coupling matrix D^{-1} A.
Matrix<double> symmetrized_coupling(const Network& net) {
  auto s = inverse_ubiquity_overlap(net);
  for (std::size_t p = 0; p < net.m(); ++p)
    for (std::size_t q = 0; q < net.m(); ++q) s(p, q) /= std::sqrt(net.diversity[p] * net.diversity[q]);
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Matrix-free y = S x for the symmetrized coupling matrix.
class SymmetricOperator {
 public:
  explicit SymmetricOperator(const Network& net) : net_(net), scaled_(net.m()), mid_(net.n()) {
    for (double k : net.diversity) inv_sqrt_div_.push_back(1.0 / std::sqrt(k));
    for (double k : net.ubiquity) inv_ubiq_.push_back(1.0 / k);
  }

  void apply(std::span<const double> x, std::span<double> y) {
    for (std::size_t p = 0; p < net_.m(); ++p) scaled_[p] = x[p] * inv_sqrt_div_[p];
    kernels::gemv({net_.cols.data(), net_.n() * net_.m()}, net_.n(), net_.m(), scaled_, mid_);
    for (std::size_t i = 0; i < net_.n(); ++i) mid_[i] *= inv_ubiq_[i];
    kernels::gemv({net_.rows.data(), net_.m() * net_.n()}, net_.m(), net_.n(), mid_, y);
    for (std::size_t p = 0; p < net_.m(); ++p) y[p] *= inv_sqrt_div_[p];
  }

 private:
  const Network& net_;
  std::vector<double> inv_sqrt_div_, inv_ubiq_, scaled_, mid_;
};

void project_out(std::span<double> x, const std::vector<std::vector<double>>& basis) {
  for (const auto& b : basis) kernels::axpy(-kernels::dot(b, x), b, x);
}

struct PowerResult {
  double value = 0.0;
  std::vector<double> vector;
};

/// Dominant eigenpair of S restricted to the complement of `basis`
/// (orthonormal). S is positive semidefinite, so dominance is by value.
PowerResult deflated_power(SymmetricOperator& op, std::size_t m, const std::vector<std::vector<double>>& basis,
                           const EciOptions& options) {
  std::vector<double> x(m), y(m);
  std::uint64_t state = 0x5EED0000ULL + basis.size();
  for (auto& v : x) v = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 - 0.5;
  project_out(x, basis);
  double nx = norm2(x);
  if (nx == 0.0) throw Error(Errc::DegenerateSpectrum, "power iteration start vector vanished");
  kernels::scale(x, 1.0 / nx);

  double residual = 0.0;
  for (int it = 1; it <= options.power_max_iter; ++it) {
    op.apply(x, y);
    project_out(y, basis);
    const double lambda = kernels::dot(x, y);
    kernels::axpy(-lambda, x, y);
    residual = norm2(y);
    kernels::axpy(lambda, x, y);
    if (residual < options.power_tol) return {lambda, x};
    const double ny = norm2(y);
    if (ny <= options.power_tol)
      return {lambda, x};  // the complement is (numerically) the null space
    kernels::scale(y, 1.0 / ny);
    std::swap(x, y);
  }
  throw NotConvergedError(options.power_max_iter, residual);
}

struct SecondPair {
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  std::vector<double> u;  // eigenvector of S
};

SecondPair second_pair_dense(const Network& net) {
  auto pairs = jacobi_eigen(symmetrized_coupling(net));
  SecondPair out;
  out.lambda2 = pairs.values[1];
  out.lambda3 = net.m() > 2 ? pairs.values[2] : -1.0;
  out.u.resize(net.m());
  for (std::size_t p = 0; p < net.m(); ++p) out.u[p] = pairs.vectors(p, 1);
  return out;
}

SecondPair second_pair_power(const Network& net, const EciOptions& options) {
  SymmetricOperator op(net);
  std::vector<double> top(net.m());
  for (std::size_t p = 0; p < net.m(); ++p) top[p] = std::sqrt(net.diversity[p]);
  kernels::scale(top, 1.0 / norm2(top));

  std::vector<std::vector<double>> basis{top};
  auto second = deflated_power(op, net.m(), basis, options);
  SecondPair out;
  out.lambda2 = second.value;
  out.u = second.vector;
  out.lambda3 = -1.0;
  if (net.m() > 2) {
    basis.push_back(second.vector);
    out.lambda3 = deflated_power(op, net.m(), basis, options).value;
  }
  return out;
}

}  // namespace

CouplingMatrix coupling_matrix(const AdvantageMatrix& m) {
  const auto net = restrict(m);
  auto values = inverse_ubiquity_overlap(net);
  for (std::size_t p = 0; p < net.m(); ++p)
    for (std::size_t q = 0; q < net.m(); ++q) values(p, q) /= net.diversity[p];
  CouplingMatrix out;
  for (auto p : net.region_index) out.regions.push_back(m.regions[p]);
  out.values = std::move(values);
  return out;
}

std::vector<double> coupling_spectrum(const AdvantageMatrix& m) {
  return jacobi_eigen(symmetrized_coupling(restrict(m))).values;
}

EciResult eci(const AdvantageMatrix& adv, const EciOptions& options) {
  const auto net = restrict(adv);
  require_connected(net, adv);
  const std::size_t m = net.m();
  if (m < 2) throw Error(Errc::DegenerateSpectrum, "fewer than two regions have comparative advantage");

  EciResult result;
  result.method = options.method;
  if (result.method == EigenMethod::Auto) result.method = m <= kDenseLimit ? EigenMethod::Dense : EigenMethod::Power;
  const auto pair = result.method == EigenMethod::Dense ? second_pair_dense(net) : second_pair_power(net, options);
  result.lambda2 = pair.lambda2;
  result.lambda3 = pair.lambda3;
  if (m > 2 && pair.lambda2 - pair.lambda3 <= options.gap_tol)
    throw Error(Errc::DegenerateSpectrum, "second eigenvalue " + std::to_string(pair.lambda2) +
                                              " is not separated from the third " + std::to_string(pair.lambda3));

  std::vector<double> k(m);
  for (std::size_t p = 0; p < m; ++p) k[p] = pair.u[p] / std::sqrt(net.diversity[p]);

  const double mean = std::accumulate(k.begin(), k.end(), 0.0) / static_cast<double>(m);
  double var = 0.0;
  for (double v : k) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(m));
  if (!(sd > 0.0) || !std::isfinite(sd))
    throw Error(Errc::DegenerateSpectrum, "eigenvector is constant; ECI is undefined");

  std::vector<double> index(m);
  for (std::size_t p = 0; p < m; ++p) index[p] = (k[p] - mean) / sd;

  // A covariance that vanishes by symmetry comes out as rounding noise, so
  // anything below kSignTol of its Cauchy-Schwarz bound counts as zero. The
  // tie-break then walks regions from most to least diverse (label order
  // within equal diversity) and makes the first clearly nonzero K positive.
  const double div_mean = std::accumulate(net.diversity.begin(), net.diversity.end(), 0.0) / static_cast<double>(m);
  double cov = 0.0, div_ss = 0.0;
  for (std::size_t p = 0; p < m; ++p) {
    cov += index[p] * (net.diversity[p] - div_mean);
    div_ss += (net.diversity[p] - div_mean) * (net.diversity[p] - div_mean);
  }
  bool flip = cov < 0.0;
  if (std::fabs(cov) <= kSignTol * std::sqrt(static_cast<double>(m) * div_ss)) {
    std::vector<std::size_t> by_diversity(m);
    std::iota(by_diversity.begin(), by_diversity.end(), std::size_t{0});
    std::stable_sort(by_diversity.begin(), by_diversity.end(),
                     [&](std::size_t a, std::size_t b) { return net.diversity[a] > net.diversity[b]; });
    double k_max = 0.0;
    for (double v : k) k_max = std::max(k_max, std::fabs(v));
    flip = false;
    for (std::size_t p : by_diversity)
      if (std::fabs(k[p]) > kSignTol * k_max) {
        flip = k[p] < 0.0;
        break;
      }
  }
  if (flip) {
    for (auto& v : index) v = -v;
    for (auto& v : k) v = -v;
  }

  result.eci.assign(adv.regions.size(), std::nullopt);
  result.k.assign(adv.regions.size(), std::nullopt);
  for (std::size_t p = 0; p < m; ++p) {
    result.eci[net.region_index[p]] = index[p];
    result.k[net.region_index[p]] = k[p];
  }
  return result;
}

FitnessResult fitness(const AdvantageMatrix& adv, const FitnessOptions& options) {
  if (options.max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be at least 1");
  if (!(options.tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  if (!(options.initial > 0.0) || !std::isfinite(options.initial))
    throw Error(Errc::InvalidArgument, "initial value must be positive and finite");
  const auto net = restrict(adv);
  const std::size_t m = net.m(), n = net.n();
  const std::span<const double> rows{net.rows.data(), m * n}, cols{net.cols.data(), n * m};

  std::vector<double> f(m, options.initial), q(n, options.initial);
  std::vector<double> f_next(m), q_next(n), inv_f(m);
  auto underflow = [](std::span<const double> v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return !(x > 0.0) || !std::isfinite(x); });
  };

  double residual = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    kernels::gemv(rows, m, n, q, f_next);
    for (std::size_t p = 0; p < m; ++p) inv_f[p] = 1.0 / f[p];
    kernels::gemv(cols, n, m, inv_f, q_next);
    for (auto& v : q_next) v = 1.0 / v;
    if (underflow(f_next) || underflow(q_next))
      throw Error(Errc::NumericalUnderflow, "fitness or complexity left the positive finite range at iteration " +
                                                std::to_string(it));

    kernels::scale(f_next, static_cast<double>(m) / kernels::sum(f_next));
    kernels::scale(q_next, static_cast<double>(n) / kernels::sum(q_next));
    if (underflow(f_next) || underflow(q_next))
      throw Error(Errc::NumericalUnderflow, "normalized fitness underflowed at iteration " + std::to_string(it));

    residual = std::max(kernels::max_abs_diff(f_next, f), kernels::max_abs_diff(q_next, q));
    std::swap(f, f_next);
    std::swap(q, q_next);
    if (residual < options.tol) {
      FitnessResult out;
      out.fitness.assign(adv.regions.size(), std::nullopt);
      out.complexity.assign(adv.industries.size(), std::nullopt);
      for (std::size_t p = 0; p < m; ++p) out.fitness[net.region_index[p]] = f[p];
      for (std::size_t i = 0; i < n; ++i) out.complexity[net.industry_index[i]] = q[i];
      out.iterations = it;
      out.residual = residual;
      return out;
    }
  }
  throw NotConvergedError(options.max_iter, residual);
}

std::vector<std::optional<double>> entropy(const CountMatrix& counts, const AdvantageMatrix& m) {
  std::unordered_map<std::string_view, std::size_t> row_of, col_of;
  for (std::size_t r = 0; r < counts.regions.size(); ++r) row_of[counts.regions[r]] = r;
  for (std::size_t c = 0; c < counts.industries.size(); ++c) col_of[counts.industries[c]] = c;
  auto lookup = [](const auto& map, const std::string& label) {
    auto it = map.find(label);
    if (it == map.end()) throw Error(Errc::InvalidArgument, "label '" + label + "' missing from count matrix");
    return it->second;
  };
  std::vector<std::size_t> cols(m.industries.size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = lookup(col_of, m.industries[i]);

  std::vector<std::optional<double>> out(m.regions.size());
  for (std::size_t p = 0; p < m.regions.size(); ++p) {
    const std::size_t row = lookup(row_of, m.regions[p]);
    std::int64_t support = 0;
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (m.entries(p, i)) support += counts.counts(row, cols[i]);
    if (support <= 0) continue;
    double h = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (!m.entries(p, i)) continue;
      const auto x = counts.counts(row, cols[i]);
      if (x == 0) continue;
      const double s = static_cast<double>(x) / static_cast<double>(support);
      h -= s * std::log(s);
    }
    out[p] = std::max(h, 0.0);
  }
  return out;
}

std::vector<std::optional<double>> ComplexityScores::region_metric(std::string_view name) const {
  if (name == "eci") return eci;
  if (name == "fitness") return fitness;
  if (name == "entropy") return entropy;
  if (name == "avg_ubiquity") return avg_ubiquity;
  if (name == "diversity") return {diversity.begin(), diversity.end()};
  throw Error(Errc::InvalidArgument, "unknown region metric '" + std::string(name) + "'");
}

ComplexityScores compute_scores(const CountMatrix& counts, const ScoreOptions& options) {
  counts.validate();
  auto pruned = prune(counts);
  auto adv = binarize(rca(pruned.counts), options.threshold);

  ComplexityScores s;
  s.year = counts.year;
  s.regions = adv.regions;
  s.industries = adv.industries;
  s.diversity = adv.diversity;
  s.ubiquity = adv.ubiquity;
  s.avg_ubiquity = adv.avg_ubiquity;
  s.dropped_regions = pruned.dropped_regions;
  s.dropped_industries = pruned.dropped_industries;
  s.options = options;

  const auto e = eci(adv, options.eci);
  s.eci = e.eci;
  s.lambda2 = e.lambda2;

  const auto f = fitness(adv, options.fitness);
  s.fitness = f.fitness;
  s.q_complexity = f.complexity;
  s.iterations_used = f.iterations;
  s.fitness_residual = f.residual;

  s.entropy = entropy(pruned.counts, adv);
  return s;
}

}  // namespace ecomplex
