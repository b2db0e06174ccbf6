#include "sensakit/error.hpp"

namespace sensakit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::missing_file: return "missing-file";
    case ErrorCode::ragged_rows: return "ragged-rows";
    case ErrorCode::non_numeric: return "non-numeric";
    case ErrorCode::duplicate_output: return "duplicate-output";
    case ErrorCode::degenerate_column: return "degenerate-column";
    case ErrorCode::degenerate_output: return "degenerate-output";
    case ErrorCode::unsupported_design: return "unsupported-design";
    case ErrorCode::not_positive_definite: return "not-positive-definite";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::calibration_mismatch: return "calibration-mismatch";
    case ErrorCode::ill_conditioned_fit: return "ill-conditioned-fit";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace sensakit
