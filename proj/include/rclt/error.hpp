#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rclt {

enum class ErrorCode {
  InvalidMeasure,
  SupportMismatch,
  VarianceAmbiguous,
  DegenerateSigma,
  BadParameters,
  HorizonExceeded,
  LengthMismatch,
  BadInterval,
  BadTime,
  UnstableGrid,
  OutOfDomain,
  NotMonotone,
  StateExplosion,
  Infeasible,
  NoConvergence,
  EmptyTheta,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Process exit code used by the command-line front end. ConfigError is 2;
// every module error maps to its own value above that.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rclt
