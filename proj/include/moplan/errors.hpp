#pragma once

#include <stdexcept>
#include <string>

namespace moplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad header, wrong row/column count, non-numeric token).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value is outside the domain allowed for its layer or parameter.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Layers disagree on grid shape, cell size or origin, or a layer kind is duplicated.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (weights, flags, key-value files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// No feasible path exists, or an endpoint is banned.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An endpoint of a plan request lies on a banned cell.
class BannedEndpointError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

/// No database record satisfies a mission constraint.
class ConstraintInfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Broken internal bookkeeping, e.g. a cycle in a parent map.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace moplan
