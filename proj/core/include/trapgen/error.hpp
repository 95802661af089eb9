#pragma once

#include <stdexcept>
#include <string>

namespace trapgen {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Series divergence, quadrature non-convergence, failed fits.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Shapes that do not fit the grid, overlapping probe regions.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Aperture sampled too coarsely.
class ResolutionError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class AliasingError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SingularCondition : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class InfeasibleBalance : public Error {
 public:
  using Error::Error;
};

class InvalidProfile : public Error {
 public:
  using Error::Error;
};

}  // namespace trapgen
