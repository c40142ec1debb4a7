#pragma once

#include <stdexcept>
#include <string>

namespace bitrade {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by geometry routines. The CLI maps these to exit code 4.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A cut would remove every point of the region.
class EmptiedRegion : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NonConvergence : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class BisectionFailure : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegenerateWidth : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class EmptyPolygon : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class InconsistentFeedback : public Error {
 public:
  using Error::Error;
};

class ModeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace bitrade
