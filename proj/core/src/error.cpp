#include "horolab/error.hpp"

namespace horolab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::singular_configuration: return "singular-configuration";
    case ErrorCode::decomposition_failed: return "decomposition-failed";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::construction_failed: return "construction-failed";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::precondition_violation: return "precondition-violation";
    case ErrorCode::invalid_exponent: return "invalid-exponent";
    case ErrorCode::empty_window: return "empty-window";
    case ErrorCode::invalid_box: return "invalid-box";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace horolab
