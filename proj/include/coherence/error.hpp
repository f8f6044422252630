#pragma once

#include <stdexcept>
#include <string>

namespace coherence {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a stated invariant (shape, Hermiticity, trace, range...).
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between operands.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Parameter outside the supported envelope (e.g. local dimension > 4 for the
/// optimizer). The CLI maps these to exit code 2.
class UnsupportedParameter : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge within its sweep budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : Error(what + " (after " + std::to_string(iterations) + " sweeps)"), iterations_(iterations) {}

  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

}  // namespace coherence
