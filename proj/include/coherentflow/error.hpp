#pragma once

#include <stdexcept>
#include <string>

namespace cf {

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch,
  integration_failure,
  solve_failure,
  eigen_failure,
  complex_spectrum,
  empty_state,
  io_error,
  parse_error,
  duplicate_observation,
  empty_result,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. The code survives the trip through the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace cf
