#pragma once

#include <stdexcept>
#include <string>

namespace ftpit {

/// Invalid user input or an unsupported combination of options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure broke down (singular pivot, non-convergent solve).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ftpit
