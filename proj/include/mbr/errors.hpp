#pragma once

#include <stdexcept>
#include <string>

namespace mbr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input document (bad syntax, wrong types).
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid document violating a model invariant. `path` points at
// the offending field, e.g. "network.edges[0].length_m".
struct ValidationError : Error {
  std::string path;
  ValidationError(std::string path_, const std::string& what_)
      : Error(path_ + ": " + what_), path(std::move(path_)) {}
};

struct DomainError : Error {
  using Error::Error;
};

struct InfeasibleTransition : Error {
  using Error::Error;
};

struct InvalidRoute : Error {
  using Error::Error;
};

struct InstanceError : Error {
  using Error::Error;
};

struct UnsatisfiableStop : Error {
  using Error::Error;
};

struct EnumerationLimitExceeded : Error {
  using Error::Error;
};

struct DecodeError : Error {
  using Error::Error;
};

struct BackendError : Error {
  using Error::Error;
};

struct NoPath : Error {
  using Error::Error;
};

struct GenerationFailure : Error {
  using Error::Error;
};

}  // namespace mbr
