#pragma once
#include <stdexcept>

namespace cbjj {

// Invalid configuration or arguments (CLI exit code 1).
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure during a run: divergence, grid overflow, no convergence
// (CLI exit code 2).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cbjj
