#pragma once

#include <stdexcept>
#include <string>

namespace hflow {

// Thrown when inputs violate an operation's preconditions (shape mismatch,
// parameter out of range, unresolvable instance id, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when an inner solver or refinement loop fails to converge. Carries
// the last residual so callers can report it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  explicit NumericalError(const std::string& what) : NumericalError(what, 0.0) {}

  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

}  // namespace hflow
