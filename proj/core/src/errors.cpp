#include "vnlab/errors.hpp"

namespace vnlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Decomposition: return "decomposition";
    case ErrorKind::Support: return "support";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Validity: return "validity";
    case ErrorKind::Standardness: return "standardness";
    case ErrorKind::NoExpectation: return "no-expectation";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::StaleDecomposition: return "stale-decomposition";
    case ErrorKind::Scope: return "scope";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Limit: return "limit";
    case ErrorKind::Degenerate: return "degenerate-input";
  }
  return "unknown";
}

}  // namespace vnlab
