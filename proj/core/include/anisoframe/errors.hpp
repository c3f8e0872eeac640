#ifndef ANISOFRAME_ERRORS_HPP
#define ANISOFRAME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace anisoframe {

// Every precondition / validation failure in the library throws Error with
// one of these codes. The CLI maps any Error to exit code 2.
enum class ErrorCode {
  NotSquare,
  NotExpansive,
  NumericalFailure,
  InvalidMargin,
  SingularInverse,
  OriginNotExcluded,
  CellOutOfBox,
  LowCellMissesOrigin,
  IndexOutOfRange,
  CoverNotCovering,
  NegativeIndexForInhomogeneous,
  AssertionFailure,
  SizeMismatch,
  InvalidExponent,
  BandMismatch,
  PrototypeKindMismatch,
  DeltaNonPositive,
  ExponentOutOfRange,
  ThresholdViolated,
  QuadratureUnderResolved,
  NonPositiveConstant,
  ConfigInvalid,
  InputUnreadable,
  Unsupported,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotExpansive: return "NotExpansive";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidMargin: return "InvalidMargin";
    case ErrorCode::SingularInverse: return "SingularInverse";
    case ErrorCode::OriginNotExcluded: return "OriginNotExcluded";
    case ErrorCode::CellOutOfBox: return "CellOutOfBox";
    case ErrorCode::LowCellMissesOrigin: return "LowCellMissesOrigin";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CoverNotCovering: return "CoverNotCovering";
    case ErrorCode::NegativeIndexForInhomogeneous: return "NegativeIndexForInhomogeneous";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::BandMismatch: return "BandMismatch";
    case ErrorCode::PrototypeKindMismatch: return "PrototypeKindMismatch";
    case ErrorCode::DeltaNonPositive: return "DeltaNonPositive";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::ThresholdViolated: return "ThresholdViolated";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::NonPositiveConstant: return "NonPositiveConstant";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InputUnreadable: return "InputUnreadable";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "UnknownError";
}

}  // namespace anisoframe

#endif
