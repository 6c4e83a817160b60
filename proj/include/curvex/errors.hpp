#pragma once

#include <stdexcept>
#include <string>

namespace curvex {

/// Bad configuration, incompatible shapes, violated preconditions.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (divergence, NaN, non-convergent iteration).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace curvex
