#include "beq/errors.hpp"

namespace beq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InfeasibleSet: return "InfeasibleSet";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::InfeasibleCut: return "InfeasibleCut";
    case ErrorCode::MissingConstants: return "MissingConstants";
    case ErrorCode::LinesearchExhausted: return "LinesearchExhausted";
    case ErrorCode::ZeroSubgradient: return "ZeroSubgradient";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingRows: return "MissingRows";
  }
  return "Unknown";
}

}  // namespace beq
