#pragma once

#include <stdexcept>
#include <string>

namespace sobext {

/// Violated precondition on an input (bad exponent, empty set, duplicate site, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The constrained solver ran out of iterations; carries the last residuals.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double first_order_residual,
                   double constraint_residual)
      : NumericalError(what),
        first_order_residual_(first_order_residual),
        constraint_residual_(constraint_residual) {}

  double first_order_residual() const noexcept { return first_order_residual_; }
  double constraint_residual() const noexcept { return constraint_residual_; }

 private:
  double first_order_residual_;
  double constraint_residual_;
};

/// The grid cannot represent the requested constraints (inconsistent after discretisation).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written, or had malformed content.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sobext
