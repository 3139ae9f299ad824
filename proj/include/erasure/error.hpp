#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace erasure {

enum class ErrorKind {
  invalid_input,
  invalid_argument,
  dimension_mismatch,
  parse_error,
  degenerate,
  divergence,
  unsupported_version,
  invariant_violation,
  usage,
  internal,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every module. Carries a machine-readable kind and the
/// originating module so the CLI can emit {error_kind, message, module}.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace erasure
