#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace elliptrack {

// Thrown when a caller violates a documented precondition: dimension
// mismatches, non-positive semi-axes, invalid configuration values, ...
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a matrix that must be symmetric positive definite fails to
// factorize, or when its smallest pivot falls below the conditioning guard.
// `matrix_name` identifies the offending matrix; `context` locates the
// failure (e.g. "run 3, step 17, measurement 4").
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(std::string matrix_name, std::string context = {})
      : std::runtime_error(make_message(matrix_name, context)),
        matrix_name_(std::move(matrix_name)),
        context_(std::move(context)) {}

  const std::string& matrix_name() const noexcept { return matrix_name_; }
  const std::string& context() const noexcept { return context_; }

 private:
  static std::string make_message(const std::string& name, const std::string& context) {
    std::string message = "matrix '" + name + "' is singular or not positive definite";
    if (!context.empty()) {
      message += " (" + context + ")";
    }
    return message;
  }

  std::string matrix_name_;
  std::string context_;
};

// Non-fatal numerical conditions (e.g. a nearly indefinite linearized
// covariance repaired by eigenvalue flooring) are reported through this hook
// so harnesses can count or silence them.  The default writes one line to
// stderr.  Install a replacement before spawning concurrent work.
using WarningHandler = void (*)(const std::string& message);

namespace detail {
inline void default_warning_handler(const std::string& message) {
  std::fprintf(stderr, "elliptrack warning: %s\n", message.c_str());
}
}  // namespace detail

inline WarningHandler& warning_handler() {
  static WarningHandler handler = &detail::default_warning_handler;
  return handler;
}

inline void emit_warning(const std::string& message) {
  if (WarningHandler handler = warning_handler()) {
    handler(message);
  }
}

}  // namespace elliptrack
