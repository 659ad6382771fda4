#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/error.hpp"
#include "ecomplex/harness.hpp"
#include "ecomplex/kernels.hpp"

using namespace ecomplex;
namespace k = ecomplex::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) * std::ldexp(1.0, static_cast<int>(rng() % 21) - 10);
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// The documented reduction order, written out independently.
double striped(const std::vector<double>& x, const std::vector<double>* y) {
  double lane[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) lane[i % 4] += y ? x[i] * (*y)[i] : x[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

std::vector<k::Isa> variants() {
  std::vector<k::Isa> out;
  for (auto isa : {k::Isa::Scalar, k::Isa::Avx2, k::Isa::Neon})
    if (k::isa_available(isa)) out.push_back(isa);
  return out;
}

struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::set_isa(saved); }
};

}  // namespace

TEST_CASE("scalar reductions follow the four-lane order") {
  std::mt19937_64 rng(11);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = random_vector(rng, n), y = random_vector(rng, n);
    CHECK(same_bits(k::scalar::kTable.sum(x.data(), n), striped(x, nullptr)));
    CHECK(same_bits(k::scalar::kTable.dot(x.data(), y.data(), n), striped(x, &y)));
  }
}

TEST_CASE("every available variant matches the scalar reference bit for bit") {
  std::mt19937_64 rng(12);
  const auto& ref = k::scalar::kTable;
  for (auto isa : variants()) {
    CAPTURE(k::isa_name(isa));
    const auto& t = k::table(isa);
    for (std::size_t n = 0; n < 131; ++n) {
      const auto x = random_vector(rng, n), y = random_vector(rng, n);
      CHECK(same_bits(t.sum(x.data(), n), ref.sum(x.data(), n)));
      CHECK(same_bits(t.dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n)));
      CHECK(same_bits(t.max_abs_diff(x.data(), y.data(), n), ref.max_abs_diff(x.data(), y.data(), n)));

      auto a1 = y, a2 = y;
      t.axpy(0.37, x.data(), a1.data(), n);
      ref.axpy(0.37, x.data(), a2.data(), n);
      CHECK(same_bits(a1, a2));

      auto s1 = x, s2 = x;
      t.scale(s1.data(), -1.25, n);
      ref.scale(s2.data(), -1.25, n);
      CHECK(same_bits(s1, s2));

      const std::size_t rows = 1 + n % 9;
      const auto a = random_vector(rng, rows * n);
      std::vector<double> g1(rows), g2(rows);
      t.gemv(a.data(), rows, n, x.data(), g1.data());
      ref.gemv(a.data(), rows, n, x.data(), g2.data());
      CHECK(same_bits(g1, g2));
    }
  }
}

TEST_CASE("max_abs_diff and gemv values") {
  const std::vector<double> x = {1, -2, 3, 4, 5}, y = {1, 2, 3, 4, 0};
  CHECK(k::max_abs_diff(x, y) == 5.0);
  const std::vector<double> a = {1, 0, 0, 0, 0, 0, 1, 0, 0, 0};
  std::vector<double> out(2);
  k::gemv(a, 2, 5, x, out);
  CHECK(out == std::vector<double>{1, -2});
  CHECK(k::sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("dispatched kernels reject mismatched lengths") {
  const std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(k::dot(a, b), Error);
  std::vector<double> c(4);
  CHECK_THROWS_AS(k::axpy(1.0, a, c), Error);
}

TEST_CASE("unavailable variants cannot be selected") {
  IsaGuard guard;
  for (auto isa : {k::Isa::Scalar, k::Isa::Avx2, k::Isa::Neon}) {
    if (k::isa_available(isa)) {
      k::set_isa(isa);
      CHECK(k::active_isa() == isa);
    } else {
      CHECK_THROWS_AS(k::set_isa(isa), Error);
    }
  }
}

TEST_CASE("solver results do not depend on the selected variant") {
  IsaGuard guard;
  const auto counts = harness::gen_noisy_nested({31, 70, 0.1, 3});
  std::vector<ComplexityScores> runs;
  for (auto isa : variants()) {
    k::set_isa(isa);
    runs.push_back(compute_scores(counts));
    ScoreOptions power;
    power.eci.method = EigenMethod::Power;
    runs.push_back(compute_scores(counts, power));
  }
  for (std::size_t r = 2; r < runs.size(); ++r) {
    CHECK(runs[r].eci == runs[r % 2].eci);
    CHECK(runs[r].fitness == runs[r % 2].fitness);
    CHECK(runs[r].iterations_used == runs[r % 2].iterations_used);
  }
}
