#include "arcoh/error.hpp"

namespace arcoh {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_field_spec: return "invalid-field-spec";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_rank: return "invalid-rank";
    case ErrorCode::degenerate_basis: return "degenerate-basis";
    case ErrorCode::not_of_lattice: return "not-an-OF-lattice";
    case ErrorCode::invalid_scale: return "invalid-scale";
    case ErrorCode::field_mismatch: return "field-mismatch";
    case ErrorCode::empty_sublattice: return "empty-sublattice";
    case ErrorCode::integer_overflow: return "integer-overflow";
    case ErrorCode::enumeration_too_large: return "enumeration-too-large";
    case ErrorCode::invalid_tolerance: return "invalid-tolerance";
    case ErrorCode::tolerance_unreachable: return "tolerance-unreachable";
    case ErrorCode::hypothesis_violated: return "hypothesis-violated";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::pole_argument: return "pole-argument";
    case ErrorCode::sampling_starved: return "sampling-starved";
    case ErrorCode::endpoint_mismatch: return "endpoint-mismatch";
    case ErrorCode::zero_rank: return "zero-rank";
    case ErrorCode::rank_cap_exceeded: return "rank-cap-exceeded";
  }
  return "unknown";
}

}  // namespace arcoh
