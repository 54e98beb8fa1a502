#include "twpa/error.hpp"

namespace twpa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::NonpositiveAlpha: return "NonpositiveAlpha";
    case ErrorCode::AbovePlasmaFrequency: return "AbovePlasmaFrequency";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::DegenerateFrequency: return "DegenerateFrequency";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateAbscissa: return "DegenerateAbscissa";
    case ErrorCode::NegativeGain: return "NegativeGain";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::UnitError: return "UnitError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoRoot:
    case ErrorCode::NonpositiveAlpha:
    case ErrorCode::StepSizeUnderflow:
    case ErrorCode::NonFiniteState:
    case ErrorCode::NoCrossing:
    case ErrorCode::SingularJacobian:
    case ErrorCode::NoConvergence:
    case ErrorCode::NegativeGain:
      return ErrorCategory::Numerical;
    case ErrorCode::IoError:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Validation;
  }
}

}  // namespace twpa
