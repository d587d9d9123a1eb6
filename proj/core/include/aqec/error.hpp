#pragma once

#include <stdexcept>
#include <string>

namespace aqec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched spaces or invalid dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A state or coefficient vector that should be normalized is not.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// A density matrix or channel output violates trace/Hermiticity/positivity.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integrator step size fell below the floor.
class StiffnessError : public Error {
 public:
  StiffnessError(double t_reached, const std::string& what)
      : Error(what), t_reached_(t_reached) {}
  double time_reached() const noexcept { return t_reached_; }

 private:
  double t_reached_;
};

/// The error basis a|u_L>/xi_u is undefined because a codeword has no photons.
class UndefinedErrorBasis : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment or configuration input.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqec
