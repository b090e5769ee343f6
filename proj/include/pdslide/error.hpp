#pragma once

#include <stdexcept>
#include <string>

namespace pdslide {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, malformed config or data files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver could not complete: divergence, iteration caps, oracle failures.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdslide
