#pragma once

#include <stdexcept>
#include <string>

namespace bnlab {

/// Base of every error raised by the library. `exit_code()` is the CLI status
/// the error maps to: 1 invalid input, 2 numerical failure, 3 failed invariant.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

class InputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class InvariantError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Input validation.
class DimensionError : public InputError { using InputError::InputError; };
class ScaleError : public InputError { using InputError::InputError; };
class GeometryError : public InputError { using InputError::InputError; };
class NotPositiveDefinite : public InputError { using InputError::InputError; };
class NonIntegrable : public InputError { using InputError::InputError; };
class ConfigError : public InputError { using InputError::InputError; };
class ParameterError : public InputError { using InputError::InputError; };

// Numerical failures.
class ConvergenceError : public NumericalError { using NumericalError::NumericalError; };
class QuadratureError : public NumericalError { using NumericalError::NumericalError; };
class FitError : public NumericalError { using NumericalError::NumericalError; };
class BlowupError : public NumericalError { using NumericalError::NumericalError; };

// Definition-level checks that came out negative.
class WitnessError : public InvariantError {
 public:
  WitnessError(const std::string& what, int failing_index)
      : InvariantError(what), failing_index_(failing_index) {}
  int failing_index() const noexcept { return failing_index_; }

 private:
  int failing_index_;
};

}  // namespace bnlab
