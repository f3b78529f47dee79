#pragma once

#include <stdexcept>
#include <string>

namespace rmf {

// Base of every error raised by the library. The CLI maps ConfigError to
// exit code 2 and NumericalError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or precondition violation (r <= 0, lambda outside the
// sub-Coulomb window, mismatched boxes, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Configuration or theorem-gate failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Anything that went wrong while computing: quadrature self-check failures,
// CFL violations, NaN/Inf, non-finite particle positions.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class CflError : public NumericalError {
 public:
  CflError(const std::string& what, double suggested_dt)
      : NumericalError(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace rmf
