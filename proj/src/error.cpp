#include "modctl/error.hpp"

namespace modctl {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::NoBracket: return "NO_BRACKET";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::StepLimit: return "STEP_LIMIT";
    case ErrorCode::IterationLimit: return "ITERATION_LIMIT";
    case ErrorCode::NonFinite: return "NON_FINITE";
  }
  return "UNKNOWN";
}

}  // namespace modctl
