#pragma once

#include <stdexcept>
#include <string>

namespace fluct {

/// Malformed or inconsistent input data (corpus rows, artifacts, lexicon files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training or evaluation could not proceed (degenerate classes, divergence).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fluct
