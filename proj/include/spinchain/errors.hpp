#pragma once

#include <stdexcept>
#include <string>

namespace spinchain {

/// Raised when an iterative numerical routine fails or a computed quantity
/// violates a conservation law beyond its tolerance.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed or inconsistent run configurations.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinchain
