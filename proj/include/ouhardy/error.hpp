#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ouh {

enum class ErrorKind {
  Dimension,
  DefiniteMatrix,
  Geometry,
  Resolution,
  Config,
  Usage,
  Input,
  Consistency,
  InequalityViolation,
  DivergentMoment,
  Singularity,
  DegenerateInput,
  Domain,
  Solver,
  Stability,
  PositivityViolation,
  SchemeConsistency,
  IdentityViolation,
  ChainViolation,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can map it
// onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::DefiniteMatrix: return "definite-matrix";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Config: return "config";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Input: return "input";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::InequalityViolation: return "inequality-violation";
    case ErrorKind::DivergentMoment: return "divergent-moment";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Stability: return "stability";
    case ErrorKind::PositivityViolation: return "positivity-violation";
    case ErrorKind::SchemeConsistency: return "scheme-consistency";
    case ErrorKind::IdentityViolation: return "identity-violation";
    case ErrorKind::ChainViolation: return "chain-violation";
  }
  return "unknown";
}

}  // namespace ouh
