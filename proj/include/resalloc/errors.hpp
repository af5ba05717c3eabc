#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resalloc {

enum class ErrorKind {
  SymmetryViolation,
  NegativeWeight,
  InvalidWeight,
  InvalidTime,
  DimensionMismatch,
  InvalidProtocol,
  InversionFailure,
  NumericalDivergence,
  StepTooLarge,
  OracleFailure,
  ConfigError,
  InfeasibleInitial,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::InvalidTime: return "InvalidTime";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidProtocol: return "InvalidProtocol";
    case ErrorKind::InversionFailure: return "InversionFailure";
    case ErrorKind::NumericalDivergence: return "NumericalDivergence";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::OracleFailure: return "OracleFailure";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::InfeasibleInitial: return "InfeasibleInitial";
  }
  return "Unknown";
}

}  // namespace resalloc
