#pragma once

#include <stdexcept>
#include <string>

namespace horolab {

enum class ErrorCode {
  invalid_argument,
  singular_configuration,
  decomposition_failed,
  invalid_config,
  construction_failed,
  invalid_state,
  precondition_violation,
  invalid_exponent,
  empty_window,
  invalid_box,
  io_error,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace horolab
