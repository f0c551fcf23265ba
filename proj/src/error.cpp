#include "manin/error.hpp"

namespace manin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPrime: return "NonPrime";
    case ErrorCode::ReducibleModulus: return "ReducibleModulus";
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ZeroForm: return "ZeroForm";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotNef: return "NotNef";
    case ErrorCode::LemmaViolation: return "LemmaViolation";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::CoincidentFirstCoords: return "CoincidentFirstCoords";
    case ErrorCode::CoincidentSecondCoords: return "CoincidentSecondCoords";
    case ErrorCode::OnBidegreeCurve: return "OnBidegreeCurve";
    case ErrorCode::FieldTooSmall: return "FieldTooSmall";
    case ErrorCode::ZeroSection: return "ZeroSection";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::OverlappingSupports: return "OverlappingSupports";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::NotSaturated: return "NotSaturated";
    case ErrorCode::NotComparable: return "NotComparable";
    case ErrorCode::CorruptCache: return "CorruptCache";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace manin
