#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qio {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or qubit counts do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure in the operator algebra (e.g. a hermitian
/// observable acquired an imaginary derivative).
class AlgebraError : public Error {
 public:
  using Error::Error;
};

/// A physical state description is not a valid quantum state.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// A Lindblad model violates its construction invariants (non-hermitian
/// Hamiltonian, negative rate, mismatched register size).
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario or command-line input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of a numerical procedure on well-formed input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : NumericalError(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

class IndefiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotHurwitzError : public NumericalError {
 public:
  NotHurwitzError(const std::string& what, double max_real_part)
      : NumericalError(what), max_real_part_(max_real_part) {}
  double max_real_part() const { return max_real_part_; }

 private:
  double max_real_part_;
};

class ResidualError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnsupportedAffineError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A balanced truncation order splits a cluster of nearly equal Hankel values.
class DegenerateSplitError : public NumericalError {
 public:
  DegenerateSplitError(const std::string& what, std::size_t k)
      : NumericalError(what), order_(k) {}
  std::size_t requested_order() const { return order_; }

 private:
  std::size_t order_;
};

}  // namespace qio
