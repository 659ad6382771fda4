#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecomplex {

enum class Errc {
  Io,
  InvalidArgument,
  MissingColumn,
  MalformedDate,
  OrderViolation,
  DuplicateFirmId,
  EmptyYear,
  DuplicateKey,
  NonNumericCell,
  InvalidValue,
  ZeroMarginal,
  EmptyAfterExclusion,
  DisconnectedNetwork,
  DegenerateSpectrum,
  NotConverged,
  NumericalUnderflow,
  ConstantInput,
  InsufficientData,
  EmptyInput,
  InsufficientYears,
  NonpositiveDenominator,
  RankDeficient,
  DegenerateShape,
  DimensionTooLarge,
  Singular,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message carries context for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(int iterations, double residual);

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Raised when the region-industry graph splits; each component lists the
/// region labels it contains.
class DisconnectedNetworkError : public Error {
 public:
  explicit DisconnectedNetworkError(std::vector<std::vector<std::string>> components);

  const std::vector<std::vector<std::string>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<std::string>> components_;
};

}  // namespace ecomplex
