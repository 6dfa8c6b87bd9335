#pragma once

#include <stdexcept>
#include <string>

namespace rruc {

/// Malformed or inconsistent user input (case file, config, CLI arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model could not be assembled or a numerical routine broke down
/// (singular network, dimension mismatch, duplicate scenario vertex).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The MILP backend is missing or failed in a way no retry will fix.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rruc
