#ifndef JMSDP_ERROR_HPP
#define JMSDP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace jmsdp {

enum class ErrorCode {
  NonSquare,
  NonFinite,
  TooAsymmetric,
  DimensionMismatch,
  DimensionOverflow,
  ConvergenceFailure,
  NumericalBreakdown,
  NotEffect,
  LengthMismatch,
  NotIsometry,
  ZeroScaling,
  TooManyMeasurements,
  UnsupportedModel,
  NotPrime,
  TrivialSubset,
  DegenerateOutcome,
  NegativeComponent,
  OutOfRange,
  InvalidArgument,
  Parse,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooAsymmetric: return "TooAsymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::NotEffect: return "NotEffect";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::ZeroScaling: return "ZeroScaling";
    case ErrorCode::TooManyMeasurements: return "TooManyMeasurements";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::TrivialSubset: return "TrivialSubset";
    case ErrorCode::DegenerateOutcome: return "DegenerateOutcome";
    case ErrorCode::NegativeComponent: return "NegativeComponent";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Domain error carrying a machine-readable code. Every failure the library
/// reports to callers goes through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace jmsdp

#endif  // JMSDP_ERROR_HPP
