#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavemap {

enum class ErrorCode {
  SingularProjection,
  OffManifold,
  NonTangent,
  BadResolution,
  NonIntegrableWeight,
  SupportViolation,
  CflViolation,
  NumericalBlowup,
  DegenerateFrame,
  FrameMismatch,
  InvariantViolation,
  NegativeFlux,
  DegenerateProfile,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerics rather than of the input.
  bool is_numerical() const noexcept;

 private:
  ErrorCode code_;
};

/// Configuration failure; the offending key is kept for reporting.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message);

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace wavemap
