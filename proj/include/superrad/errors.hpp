#pragma once

#include <stdexcept>
#include <string>

namespace superrad {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter set violates a type invariant (negative rate, NaN, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A formula was evaluated at a parameter where it is singular (kappa = 0).
class SingularParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidDirectionError : public Error {
 public:
  using Error::Error;
};

class NoResonanceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedShapeError : public Error {
 public:
  using Error::Error;
};

/// Requested Hilbert space exceeds the configured dimension bound.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not make progress.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double time, double smallest_step)
      : Error(what), time_(time), smallest_step_(smallest_step) {}

  double time() const noexcept { return time_; }
  double smallest_step() const noexcept { return smallest_step_; }

 private:
  double time_;
  double smallest_step_;
};

/// A mean-field Bloch vector left the unit ball.
class ClosureInstabilityError : public Error {
 public:
  using Error::Error;
};

class UnknownPolicyError : public Error {
 public:
  using Error::Error;
};

/// Time grids of runs merged into one map do not agree.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace superrad
