#pragma once

#include <stdexcept>
#include <string>

namespace propcalc {

/// Base class for domain errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class BoundaryMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownGenerator : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when an enumeration or search would exceed its configured cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (JSON documents, CLI flags).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace propcalc
