#include "ecomplex/error.hpp"

#include <sstream>

namespace ecomplex {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::Io: return "Io";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedDate: return "MalformedDate";
    case Errc::OrderViolation: return "OrderViolation";
    case Errc::DuplicateFirmId: return "DuplicateFirmId";
    case Errc::EmptyYear: return "EmptyYear";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::ZeroMarginal: return "ZeroMarginal";
    case Errc::EmptyAfterExclusion: return "EmptyAfterExclusion";
    case Errc::DisconnectedNetwork: return "DisconnectedNetwork";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::NotConverged: return "NotConverged";
    case Errc::NumericalUnderflow: return "NumericalUnderflow";
    case Errc::ConstantInput: return "ConstantInput";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InsufficientYears: return "InsufficientYears";
    case Errc::NonpositiveDenominator: return "NonpositiveDenominator";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::DegenerateShape: return "DegenerateShape";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::Singular: return "Singular";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

namespace {

std::string not_converged_message(int iterations, double residual) {
  std::ostringstream os;
  os << "no convergence after " << iterations << " iterations (last residual " << residual << ")";
  return os.str();
}

std::string components_message(const std::vector<std::vector<std::string>>& components) {
  std::ostringstream os;
  os << "network splits into " << components.size() << " components:";
  for (const auto& c : components) {
    os << " {";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "}";
  }
  return os.str();
}

}  // namespace

NotConvergedError::NotConvergedError(int iterations, double residual)
    : Error(Errc::NotConverged, not_converged_message(iterations, residual)),
      iterations_(iterations),
      residual_(residual) {}

DisconnectedNetworkError::DisconnectedNetworkError(std::vector<std::vector<std::string>> components)
    : Error(Errc::DisconnectedNetwork, components_message(components)), components_(std::move(components)) {}

}  // namespace ecomplex
