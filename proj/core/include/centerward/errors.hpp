#pragma once

#include <stdexcept>
#include <string>

namespace centerward {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (x = 0 for u_d, s outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed geometry: duplicate atoms, self-intersecting cells.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Invalid density parameters or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on an object that is not ready for it (unsolved map).
class StateError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace centerward
