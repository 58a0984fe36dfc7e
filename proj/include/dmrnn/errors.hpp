#pragma once

#include <stdexcept>
#include <string>

namespace dmrnn {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or size mismatch between operands.
struct DimensionError : Error {
  using Error::Error;
};

// A caller violated an operation's precondition (zero vector, d = 0, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

// A density-matrix invariant failed beyond tolerance.
// `defect` is the measured violation (Frobenius norm, trace deviation,
// or most-negative eigenvalue, depending on the subclass).
struct ValidationError : Error {
  double defect;
  ValidationError(const std::string& msg, double measured_defect)
      : Error(msg), defect(measured_defect) {}
};

struct NotHermitian : ValidationError {
  using ValidationError::ValidationError;
};
struct NotUnitTrace : ValidationError {
  using ValidationError::ValidationError;
};
struct NotPSD : ValidationError {
  using ValidationError::ValidationError;
};

// The eigensolver failed to converge on a pathological input.
struct NonConvergence : Error {
  using Error::Error;
};

// Numerical breakdown: degenerate normalization matrix, trace drift
// beyond correction range, diverged optimization, ...
struct NumericalError : Error {
  using Error::Error;
};

// Malformed configuration or input file. CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dmrnn
