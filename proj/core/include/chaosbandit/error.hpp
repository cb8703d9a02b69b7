#pragma once

#include <stdexcept>
#include <string>

namespace chaosbandit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A decision needed samples past the end of the series.
class SeriesExhausted : public Error {
 public:
  using Error::Error;
};

/// File could not be read/written, or its contents did not parse.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chaosbandit
