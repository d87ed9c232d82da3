#pragma once

#include <stdexcept>
#include <string>

namespace berknash {

enum class ErrorKind {
  SingularMatrix,
  NoConvergence,
  InvalidParams,
  EmptyAttention,
  DegenerateRegressor,
  ZeroBaselineCost,
  InfeasibleBudget,
  NumericalFailure,
  Diverged,
  ConfigError,
  IoError,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptyAttention: return "EmptyAttention";
    case ErrorKind::DegenerateRegressor: return "DegenerateRegressor";
    case ErrorKind::ZeroBaselineCost: return "ZeroBaselineCost";
    case ErrorKind::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

// Failure with a machine-readable class. Messages carry the class name as a
// prefix so they stay identifiable after crossing the C boundary as strings.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace berknash
