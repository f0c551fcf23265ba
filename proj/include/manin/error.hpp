#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace manin {

enum class ErrorCode {
  NonPrime,
  ReducibleModulus,
  UnsupportedSize,
  DivisionByZero,
  ZeroForm,
  BothZero,
  TooLarge,
  NotNef,
  LemmaViolation,
  Unbounded,
  DegenerateInput,
  CoincidentFirstCoords,
  CoincidentSecondCoords,
  OnBidegreeCurve,
  FieldTooSmall,
  ZeroSection,
  BudgetExceeded,
  OverlappingSupports,
  DegreeMismatch,
  NotSaturated,
  NotComparable,
  CorruptCache,
  VersionMismatch,
  IoError,
  InvalidConfig,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports carries one of the codes above so that
// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace manin
