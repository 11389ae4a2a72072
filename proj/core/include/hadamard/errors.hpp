#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hadamard {

/// A point or stencil left the model's coordinate box.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation was called outside the parameter range it supports, e.g.
/// pointwise evaluation of a Riesz distribution below the function regime.
class RegimeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Derivative order beyond what the closed-form recurrences support.
class UnsupportedOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad run configuration or command-line usage.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature could not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::complex<double> estimate,
                   double error_estimate)
      : std::runtime_error(what),
        estimate_(estimate),
        error_estimate_(error_estimate) {}

  std::complex<double> estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  std::complex<double> estimate_;
  double error_estimate_;
};

}  // namespace hadamard
