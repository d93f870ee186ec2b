#pragma once

#include <stdexcept>
#include <string>

namespace idl {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad dimensions, malformed files, out-of-range parameters.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Filesystem failures (cannot open, read, or write).
class IoError : public Error {
public:
  using Error::Error;
};

/// A numerical computation produced a non-finite value.
class NumericError : public Error {
public:
  using Error::Error;
};

} // namespace idl
