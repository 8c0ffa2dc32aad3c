#pragma once

#include <stdexcept>
#include <string>

namespace rave {

enum class ErrorCode {
  EmptySample,
  NonFiniteValue,
  QuantileOutOfRange,
  BetaOutOfRange,
  WeightOutOfRange,
  NonpositiveEpsilon,
  NoConvergence,
  BadRange,
  BadBounds,
  SingularSystem,
  EmptySet,
  NoDescent,
  ConfigParse,
  InvalidSpec,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rave
