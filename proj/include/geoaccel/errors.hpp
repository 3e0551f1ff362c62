#pragma once

#include <stdexcept>
#include <string>

namespace geoaccel {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid inputs to a factory or builder (non-symmetric H, singular A, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Query outside the region where an evaluator is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation not available for this kind of objective or system.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Bad experiment configuration (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative inner solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what + " (residual " + std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// An integrator produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

}  // namespace geoaccel
