#pragma once

#include <stdexcept>
#include <string>

namespace fao {

enum class ErrorCode {
  invalid_argument,
  io,
  malformed_file,
  unsupported_format,
  rate_too_high,
  image_too_small,
  too_few_matches,
  no_consensus,
  degenerate_configuration,
  constraint_unsatisfiable,
  empty_support,
  singular_transform,
  insufficient_overlap,
  flat_image,
  no_pairs,
  internal,
};

const char* error_code_name(ErrorCode code);

/// Every library failure is reported as an Error; code() identifies the class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fao
