#pragma once

#include <stdexcept>
#include <string>

namespace gcl {

// Coarse failure categories. The CLI prints them as a machine-parseable
// prefix, so keep the spellings stable.
enum class ErrorKind {
  dimension,  // shape mismatch between tensors / layers / records
  numeric,    // NaN or Inf reached the optimizer or a loss
  format,     // malformed file contents
  io,         // could not open / read / write a path
  config,     // invalid configuration or flag combination
  state,      // operation called in the wrong order (e.g. backward before forward)
  data,       // dataset content problem (empty, missing labels, ...)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gcl
