#pragma once

#include <stdexcept>
#include <string>

namespace vlsm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters (bad p-threshold list, roi outside brain).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed input data, geometry mismatch.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical failure (non-finite scores, non-converging series, no analyzable voxels).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace vlsm
