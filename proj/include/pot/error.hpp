#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pot {

enum class ErrorCode {
  kKeyError,
  kBadVehicleSignature,
  kImplausibleReport,
  kOwnershipFailure,
  kExpired,
  kIllegitimateIssuer,
  kEmptyChain,
  kMissingPosition,
  kInvalidCount,
  kUnverifiedChain,
  kIndexOutOfRange,
  kTooLarge,
  kInfeasible,
  kConfigError,
  kInvalidArgument,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Domain error carrying a machine-readable code. Every failure the library
// reports through exceptions uses this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pot
