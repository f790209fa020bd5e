#pragma once

#include <stdexcept>
#include <string>

namespace m2fgb {

// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration or usage (CLI exit code 1).
struct ConfigError : Error {
  using Error::Error;
};

// Data loading / validation failure (CLI exit code 2).
struct DataError : Error {
  using Error::Error;
};

// Failure during training (CLI exit code 3).
struct TrainError : Error {
  using Error::Error;
};

}  // namespace m2fgb
