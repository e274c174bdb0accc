#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modctl {

enum class ErrorCode {
  Domain,        // argument outside the operation's domain
  Degenerate,    // well-posed request whose answer is degenerate (e.g. infinite duration)
  NoBracket,     // shooting / root finding found no sign change
  Unsupported,   // operation not defined for this incentive / cost combination
  StepLimit,     // integrator ran out of steps
  IterationLimit,
  NonFinite,
};

/// Stable machine-readable name used by the CLI error JSON.
std::string_view error_code_name(ErrorCode code);

class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modctl
