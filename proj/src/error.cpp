#include "fbsde/error.hpp"

namespace fbsde {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::OutOfDomain: return "out of domain";
    case ErrorCode::Diverged: return "diverged";
    case ErrorCode::NonConvergence: return "no convergence";
    case ErrorCode::SingularDenominator: return "singular denominator";
    case ErrorCode::MissingExact: return "missing exact solution";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Usage: return "usage error";
  }
  return "unknown error";
}

}  // namespace fbsde
