#pragma once

#include <stdexcept>
#include <string>

namespace prodgeo {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid numeric domain: division by a zero-valued jet, sqrt of a
/// non-positive value, a stencil leaving the chart, sigma <= 0.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A vector that must be tangent (or normal) is not, or a point is off the
/// ambient quadric.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Jacobian of an immersion is rank deficient.
class RankError : public Error {
 public:
  using Error::Error;
};

class FlatnessError : public Error {
 public:
  using Error::Error;
};

/// Principal decomposition could not find a generic combination of shape
/// operators after the allowed number of draws.
class GenericityError : public Error {
 public:
  using Error::Error;
};

class NotEinsteinError : public Error {
 public:
  using Error::Error;
};

class NotMinimalError : public Error {
 public:
  using Error::Error;
};

/// T vanishes (below t_zero_tol) where a T-dependent construction is needed.
class DegenerateTError : public Error {
 public:
  using Error::Error;
};

class SpecMismatchError : public Error {
 public:
  using Error::Error;
};

class UnknownEntryError : public Error {
 public:
  using Error::Error;
};

class ParamRangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace prodgeo
