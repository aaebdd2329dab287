#pragma once

#include <stdexcept>
#include <string>

namespace cpforce {

/// Invalid run configuration or parameter set. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain of a physical formula (pole, point below the
/// surface, wrong state dimension, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for failures of the numerical machinery. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double value_estimate, double error_estimate)
      : NumericalError(what), value_(value_estimate), error_(error_estimate) {}

  double value_estimate() const { return value_; }
  double error_estimate() const { return error_; }

 private:
  double value_;
  double error_;
};

/// Near-field image factor (eps(w0)-1)/(eps(w0)+1) diverges at the surface plasmon pole.
class ResonanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Time stepping became unstable (detected through trace drift or step bound).
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cpforce
