#pragma once

#include <stdexcept>
#include <string>

namespace rank1part {

// Invalid arguments, violated preconditions, malformed configuration.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Structurally unusable input (all rows identical, zero column sum, ...).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative scheme ran out of iterations; carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Non-finite intermediate values or a failed matrix decomposition.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model selection found no admissible candidate.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic data generation exhausted its retry budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rank1part
