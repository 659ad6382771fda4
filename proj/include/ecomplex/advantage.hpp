#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecomplex/ingest.hpp"
#include "ecomplex/matrix.hpp"

namespace ecomplex {

/// Count matrix with all-zero rows and columns removed, plus what was dropped.
struct PrunedCounts {
  CountMatrix counts;
  std::vector<std::string> dropped_regions;
  std::vector<std::string> dropped_industries;
};

PrunedCounts prune(const CountMatrix& counts);

struct RcaMatrix {
  std::vector<std::string> regions;
  std::vector<std::string> industries;
  Matrix<double> values;
};

/// Revealed comparative advantage: a region's share of an industry over that
/// industry's global share. Throws Error(ZeroMarginal) on an empty row or
/// column; call prune() first.
RcaMatrix rca(const CountMatrix& counts);

/// Binary advantage matrix with its degree vectors.
///   diversity[p]    = number of industries with M = 1 (k_{p,0})
///   ubiquity[i]     = number of regions with M = 1 (k_{i,0})
///   avg_ubiquity[p] = mean ubiquity over p's advantaged industries (k_{p,1}),
///                     missing when diversity[p] == 0
struct AdvantageMatrix {
  std::vector<std::string> regions;
  std::vector<std::string> industries;
  Matrix<std::uint8_t> entries;
  std::vector<int> diversity;
  std::vector<int> ubiquity;
  std::vector<std::optional<double>> avg_ubiquity;

  /// Builds the degree vectors from a 0/1 matrix. Throws
  /// Error(InvalidArgument) on a shape mismatch or a non-binary entry.
  static AdvantageMatrix from_entries(std::vector<std::string> regions, std::vector<std::string> industries,
                                      Matrix<std::uint8_t> entries);
};

/// M = 1 where RCA >= threshold (inclusive).
AdvantageMatrix binarize(const RcaMatrix& rca, double threshold = 1.0);

std::vector<std::optional<double>> avg_ubiquity(const AdvantageMatrix& m);

/// Position relative to the mean diversity and mean average-ubiquity, with
/// ties counted on the high side.
struct Quadrant {
  bool high_diversity = false;
  bool high_ubiquity = false;

  std::string label() const;
  friend bool operator==(const Quadrant&, const Quadrant&) = default;
};

/// Means are taken over regions whose average ubiquity is defined; the other
/// regions get no quadrant. Throws Error(InsufficientData) if no region has a
/// defined average ubiquity.
std::vector<std::optional<Quadrant>> quadrants(const AdvantageMatrix& m);

}  // namespace ecomplex
