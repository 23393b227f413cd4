#pragma once

#include <stdexcept>
#include <string>

namespace amtl {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible shapes (matrix products, column lengths, ragged task files).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid argument values (negative delay, bad label alphabet, empty sweep).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Configuration outside the supported regime (step size, empty step interval).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: divergence, non-finite iterates, SVD non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Measured staleness exceeded the configured bound. Treated as a numerical
// failure for exit-code purposes: the convergence guarantee no longer holds.
class StalenessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Filesystem failures; message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace amtl
