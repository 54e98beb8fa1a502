#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twpa {

enum class ErrorCode {
  InvalidArgument,
  NoRoot,
  NonpositiveAlpha,
  AbovePlasmaFrequency,
  EmptyTable,
  DegenerateFrequency,
  StepSizeUnderflow,
  NonFiniteState,
  NoCrossing,
  SingularJacobian,
  NoConvergence,
  DegenerateAbscissa,
  NegativeGain,
  GridMismatch,
  EmptyOverlap,
  BadWindow,
  ParseError,
  UnknownKey,
  UnitError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Broad failure class, used by the command-line tool to pick an exit status.
enum class ErrorCategory { Validation, Numerical, Io };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace twpa
