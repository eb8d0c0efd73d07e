#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aquad {

enum class ErrorCode {
  InvalidArgument,
  DegenerateForm,
  DenominatorNotPPower,
  DenominatorDivisibleByP,
  BoxTooLarge,
  CapExceeded,
  BadPrime,
  NotStabilized,
  ChartDegenerate,
  DegenerateFit,
  ZeroDenominator,
  MissingPrime,
  NotSquarefree,
  InvalidDensity,
  Overflow,
  ConfigInvalid,
  Io,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace aquad
