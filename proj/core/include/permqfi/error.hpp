#pragma once

#include <stdexcept>
#include <string>

namespace permqfi {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied an argument outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integration or linear algebra failed (step underflow, non-finite values,
/// invariant drift, non-converging fit).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Cache or output file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace permqfi
