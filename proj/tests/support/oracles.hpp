#pragma once
// Reference computations for tests. They use long double loops written
// directly from the definitions and never call the library's numeric code.

#include <cstdint>
#include <random>
#include <vector>

#include "ecomplex/advantage.hpp"
#include "ecomplex/matrix.hpp"

namespace oracle {

/// Student t density.
long double t_density(long double t, long double df);
/// Two-sided p-value from adaptive Simpson integration of the density.
double t_two_sided(double t, double df);

struct Pearson {
  double r = 0.0;
  double p = 1.0;
};
/// Textbook formula in long double, p from t_two_sided.
Pearson pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Descending ranks with averaged ties, by counting.
std::vector<double> rank(const std::vector<double>& v);

/// Coupling matrix straight from the triple sum.
ecomplex::Matrix<double> coupling(const ecomplex::Matrix<std::uint8_t>& m);

/// One fitness-complexity step from (F, Q), each output normalized by its mean.
void fitness_step(const ecomplex::Matrix<std::uint8_t>& m, const std::vector<double>& f,
                  const std::vector<double>& q, std::vector<double>& f_out, std::vector<double>& q_out);

/// Shannon entropy in nats of a count vector.
double entropy(const std::vector<long long>& counts);

}  // namespace oracle

namespace gen {

using Rng = std::mt19937_64;

/// Random 0/1 matrix with no empty line whose bipartite graph is connected.
/// Rows are m in [m_lo, m_hi], columns n in [n_lo, n_hi].
ecomplex::Matrix<std::uint8_t> connected_binary(Rng& rng, int m_lo, int m_hi, int n_lo, int n_hi);

ecomplex::AdvantageMatrix advantage(const ecomplex::Matrix<std::uint8_t>& entries);

bool connected(const ecomplex::Matrix<std::uint8_t>& m);

}  // namespace gen
