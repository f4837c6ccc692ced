#pragma once

#include <stdexcept>
#include <string>

namespace qprkit {

/// Argument outside the mathematical domain of a function (negative
/// probability, non-positive Bessel argument, zero reference signal).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Invalid configuration: quantizer levels, sparsity, grid parameters.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Vector or matrix shapes that do not agree with the ensemble.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input that admits no distinguished answer, e.g. a zero spectral matrix
/// or two collinear signals.
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method ran out of budget. `residual` carries the last
/// convergence measure so callers can decide whether to accept it.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

}  // namespace qprkit
