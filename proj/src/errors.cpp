#include "fao/errors.hpp"

namespace fao {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::io: return "io";
    case ErrorCode::malformed_file: return "malformed-file";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::rate_too_high: return "rate-too-high";
    case ErrorCode::image_too_small: return "image-too-small";
    case ErrorCode::too_few_matches: return "too-few-matches";
    case ErrorCode::no_consensus: return "no-consensus";
    case ErrorCode::degenerate_configuration: return "degenerate-configuration";
    case ErrorCode::constraint_unsatisfiable: return "constraint-unsatisfiable";
    case ErrorCode::empty_support: return "empty-support";
    case ErrorCode::singular_transform: return "singular-transform";
    case ErrorCode::insufficient_overlap: return "insufficient-overlap";
    case ErrorCode::flat_image: return "flat-image";
    case ErrorCode::no_pairs: return "no-pairs";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace fao
