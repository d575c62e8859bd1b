#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arcoh {

enum class ErrorCode {
  invalid_field_spec,
  dimension_mismatch,
  invalid_rank,
  degenerate_basis,
  not_of_lattice,
  invalid_scale,
  field_mismatch,
  empty_sublattice,
  integer_overflow,
  enumeration_too_large,
  invalid_tolerance,
  tolerance_unreachable,
  hypothesis_violated,
  invalid_argument,
  pole_argument,
  sampling_starved,
  endpoint_mismatch,
  zero_rank,
  rank_cap_exceeded,
};

/// Stable machine-readable name, used in CLI error reports.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arcoh
