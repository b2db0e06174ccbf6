#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sensakit {

enum class ErrorCode {
  missing_file,
  ragged_rows,
  non_numeric,
  duplicate_output,
  degenerate_column,
  degenerate_output,
  unsupported_design,
  not_positive_definite,
  domain_error,
  length_mismatch,
  dimension_mismatch,
  calibration_mismatch,
  ill_conditioned_fit,
  budget_exceeded,
  invalid_argument,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sensakit
