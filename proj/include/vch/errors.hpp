#pragma once

#include <stdexcept>
#include <string>

namespace vch {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or kernel/grid constraint violation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Fields defined on incompatible grids.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Bad argument to an operation (out-of-range r, mass mismatch, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Invalid input data (negative density, non-finite values).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// CFL violation. Carries a step size that would satisfy the bound.
class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// File system or snapshot format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vch
