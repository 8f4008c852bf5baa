#pragma once

#include <stdexcept>
#include <string>

namespace maskvid {

// Invalid user-supplied configuration: bad config keys, task parameters out
// of range, not enough data to fit a codebook. Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch between videos, grids, masks and parameter tables.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Token id outside the range an operation accepts.
struct VocabError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric contract broken at runtime: non-finite loss or gradient, predictor
// row that is not a probability distribution.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed, truncated or unwritable artifact file.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace maskvid
