#pragma once

#include <stdexcept>
#include <string>

namespace qite {

// Invalid sizes, parameters, or violated operation preconditions.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// SVD breakdown, non-finite tensor entries, degenerate (zero-norm) states.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File access and format problems.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qite
