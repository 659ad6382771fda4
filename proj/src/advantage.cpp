#include "ecomplex/advantage.hpp"

#include "ecomplex/error.hpp"

namespace ecomplex {

PrunedCounts prune(const CountMatrix& counts) {
  const std::size_t m = counts.counts.rows(), n = counts.counts.cols();
  std::vector<std::int64_t> row_sum(m, 0), col_sum(n, 0);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n; ++i) {
      row_sum[p] += counts.counts(p, i);
      col_sum[i] += counts.counts(p, i);
    }

  PrunedCounts out;
  out.counts.year = counts.year;
  std::vector<std::size_t> keep_rows, keep_cols;
  for (std::size_t p = 0; p < m; ++p) {
    if (row_sum[p] > 0) {
      keep_rows.push_back(p);
      out.counts.regions.push_back(counts.regions[p]);
    } else {
      out.dropped_regions.push_back(counts.regions[p]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (col_sum[i] > 0) {
      keep_cols.push_back(i);
      out.counts.industries.push_back(counts.industries[i]);
    } else {
      out.dropped_industries.push_back(counts.industries[i]);
    }
  }
  out.counts.counts = Matrix<std::int64_t>(keep_rows.size(), keep_cols.size());
  for (std::size_t r = 0; r < keep_rows.size(); ++r)
    for (std::size_t c = 0; c < keep_cols.size(); ++c)
      out.counts.counts(r, c) = counts.counts(keep_rows[r], keep_cols[c]);
  return out;
}

RcaMatrix rca(const CountMatrix& counts) {
  const std::size_t m = counts.counts.rows(), n = counts.counts.cols();
  std::vector<std::int64_t> row_sum(m, 0), col_sum(n, 0);
  std::int64_t total = 0;
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = counts.counts(p, i);
      if (x < 0) throw Error(Errc::InvalidValue, "negative count in " + counts.regions[p]);
      row_sum[p] += x;
      col_sum[i] += x;
      total += x;
    }
  for (std::size_t p = 0; p < m; ++p)
    if (row_sum[p] == 0) throw Error(Errc::ZeroMarginal, "region '" + counts.regions[p] + "' has no firms");
  for (std::size_t i = 0; i < n; ++i)
    if (col_sum[i] == 0) throw Error(Errc::ZeroMarginal, "industry '" + counts.industries[i] + "' has no firms");

  RcaMatrix out{counts.regions, counts.industries, Matrix<double>(m, n)};
  // (x / r) / (c / T) rearranged to x*T / (r*c): both products are exact for
  // realistic firm counts, so the single division is correctly rounded and an
  // exact unit ratio lands on exactly 1.0.
  const double t = static_cast<double>(total);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(counts.counts(p, i));
      out.values(p, i) = (x * t) / (static_cast<double>(row_sum[p]) * static_cast<double>(col_sum[i]));
    }
  return out;
}

AdvantageMatrix AdvantageMatrix::from_entries(std::vector<std::string> regions, std::vector<std::string> industries,
                                              Matrix<std::uint8_t> entries) {
  if (entries.rows() != regions.size() || entries.cols() != industries.size())
    throw Error(Errc::InvalidArgument, "advantage matrix shape does not match its labels");
  AdvantageMatrix out;
  out.regions = std::move(regions);
  out.industries = std::move(industries);
  out.entries = std::move(entries);
  const std::size_t m = out.entries.rows(), n = out.entries.cols();
  out.diversity.assign(m, 0);
  out.ubiquity.assign(n, 0);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = out.entries(p, i);
      if (v > 1) throw Error(Errc::InvalidArgument, "advantage matrix entries must be 0 or 1");
      out.diversity[p] += v;
      out.ubiquity[i] += v;
    }
  out.avg_ubiquity = ecomplex::avg_ubiquity(out);
  return out;
}

AdvantageMatrix binarize(const RcaMatrix& rca, double threshold) {
  if (!(threshold > 0.0)) throw Error(Errc::InvalidArgument, "RCA threshold must be positive");
  Matrix<std::uint8_t> m(rca.values.rows(), rca.values.cols());
  for (std::size_t p = 0; p < m.rows(); ++p)
    for (std::size_t i = 0; i < m.cols(); ++i) m(p, i) = rca.values(p, i) >= threshold ? 1 : 0;
  return AdvantageMatrix::from_entries(rca.regions, rca.industries, std::move(m));
}

std::vector<std::optional<double>> avg_ubiquity(const AdvantageMatrix& m) {
  const std::size_t rows = m.entries.rows(), cols = m.entries.cols();
  std::vector<int> ubiquity(cols, 0);
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t i = 0; i < cols; ++i) ubiquity[i] += m.entries(p, i);

  std::vector<std::optional<double>> out(rows);
  for (std::size_t p = 0; p < rows; ++p) {
    long weighted = 0, degree = 0;
    for (std::size_t i = 0; i < cols; ++i)
      if (m.entries(p, i)) {
        weighted += ubiquity[i];
        ++degree;
      }
    if (degree > 0) out[p] = static_cast<double>(weighted) / static_cast<double>(degree);
  }
  return out;
}

std::string Quadrant::label() const {
  return std::string(high_diversity ? "high" : "low") + "_diversity/" + (high_ubiquity ? "high" : "low") +
         "_ubiquity";
}

std::vector<std::optional<Quadrant>> quadrants(const AdvantageMatrix& m) {
  const auto k1 = avg_ubiquity(m);
  double div_sum = 0.0, k1_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < k1.size(); ++p)
    if (k1[p]) {
      div_sum += m.diversity[p];
      k1_sum += *k1[p];
      ++count;
    }
  if (count == 0) throw Error(Errc::InsufficientData, "no region has a defined average ubiquity");
  const double div_mean = div_sum / static_cast<double>(count);
  const double k1_mean = k1_sum / static_cast<double>(count);

  std::vector<std::optional<Quadrant>> out(k1.size());
  for (std::size_t p = 0; p < k1.size(); ++p)
    if (k1[p]) out[p] = Quadrant{m.diversity[p] >= div_mean, *k1[p] >= k1_mean};
  return out;
}

}  // namespace ecomplex
