#pragma once

#include <stdexcept>

namespace ndconv {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension count or extent disagreement between operands.
struct ShapeError : Error {
  using Error::Error;
};

// Multi-index outside a tensor's extents.
struct BoundsError : Error {
  using Error::Error;
};

// Malformed file content: bad magic, broken header, truncated payload.
struct FormatError : Error {
  using Error::Error;
};

// Degenerate operators, undefined metrics, unrepresentable samples.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace ndconv
