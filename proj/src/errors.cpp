#include "pidmd/errors.hpp"

namespace pidmd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SingularEigenvalue: return "SingularEigenvalue";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::SpecRejected: return "SpecRejected";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::SingularEigenvalue:
      return 3;
    case ErrorKind::DivergenceDetected:
      return 4;
    default:
      return 2;
  }
}

}  // namespace pidmd
