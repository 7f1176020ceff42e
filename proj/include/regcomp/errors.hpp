#pragma once

#include <stdexcept>
#include <string>

namespace regcomply {

// Bad input: wrong dimensions, incompatible pairing, out-of-range parameter.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Valid input that the requested operation does not cover.
struct Unsupported : ConfigError {
  using ConfigError::ConfigError;
};

// Exact enumeration refused because it exceeds the cap.
struct InstanceTooLarge : ConfigError {
  using ConfigError::ConfigError;
};

// Iteration cap hit or an estimator produced nothing usable.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw ConfigError(msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace regcomply
