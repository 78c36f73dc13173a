#pragma once

#include <stdexcept>

namespace alsm {

// Configuration document or argument violates its contract.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure: missing input, unreadable or unwritable path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulation or training run produced non-finite state.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace alsm
