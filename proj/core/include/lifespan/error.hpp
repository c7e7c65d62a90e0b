#pragma once

#include <stdexcept>
#include <string>

namespace lifespan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters or preconditions that the caller can fix.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field contains NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// The periodic box is too small: the solution reached the boundary.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A transform or profile is not resolved by the grid it lives on.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The profile ODE left its admissible range: W_delta dropped below the floor
/// or s exceeded the horizon B.
class BlowupError : public Error {
 public:
  BlowupError(const std::string& what, double xi) : Error(what), xi_(xi) {}
  double xi() const noexcept { return xi_; }

 private:
  double xi_;
};

/// A numerical procedure (quadrature refinement, ODE step doubling) did not
/// reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace lifespan
