#include "wavemap/error.hpp"

namespace wavemap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularProjection: return "SingularProjection";
    case ErrorCode::OffManifold: return "OffManifold";
    case ErrorCode::NonTangent: return "NonTangent";
    case ErrorCode::BadResolution: return "BadResolution";
    case ErrorCode::NonIntegrableWeight: return "NonIntegrableWeight";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NegativeFlux: return "NegativeFlux";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case ErrorCode::CflViolation:
    case ErrorCode::NumericalBlowup:
    case ErrorCode::DegenerateFrame:
    case ErrorCode::FrameMismatch:
    case ErrorCode::InvariantViolation:
    case ErrorCode::NegativeFlux:
    case ErrorCode::SingularProjection:
    case ErrorCode::OffManifold:
    case ErrorCode::NonTangent:
      return true;
    default:
      return false;
  }
}

ConfigError::ConfigError(std::string key, const std::string& message)
    : Error(ErrorCode::ConfigError, key + ": " + message), key_(std::move(key)) {}

}  // namespace wavemap
