#pragma once

#include <stdexcept>
#include <string>

namespace hgde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: shape mismatch, out-of-range parameter, parse failure.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value or hit an ill-posed configuration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgde
