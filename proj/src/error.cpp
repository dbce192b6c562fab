#include "pot/error.hpp"

namespace pot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kKeyError: return "KeyError";
    case ErrorCode::kBadVehicleSignature: return "BadVehicleSignature";
    case ErrorCode::kImplausibleReport: return "ImplausibleReport";
    case ErrorCode::kOwnershipFailure: return "OwnershipFailure";
    case ErrorCode::kExpired: return "Expired";
    case ErrorCode::kIllegitimateIssuer: return "IllegitimateIssuer";
    case ErrorCode::kEmptyChain: return "EmptyChain";
    case ErrorCode::kMissingPosition: return "MissingPosition";
    case ErrorCode::kInvalidCount: return "InvalidCount";
    case ErrorCode::kUnverifiedChain: return "UnverifiedChain";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pot
