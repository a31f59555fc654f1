#pragma once

#include <stdexcept>
#include <string>

namespace mnfret {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, dimension mismatches, invalid configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Missing files, unreadable or malformed payloads.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Factorization failures, singular systems, rank deficiency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mnfret
