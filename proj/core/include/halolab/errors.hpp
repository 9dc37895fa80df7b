#pragma once

#include <stdexcept>
#include <string>

namespace halo {

// Bad user input: malformed config, missing field, out-of-range knob. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failure: non-finite state, divergence, no convergence. CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent shapes between parameter blocks, gradients, or inputs.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace halo
