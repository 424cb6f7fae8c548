#pragma once

#include <stdexcept>
#include <string>

namespace ccx {

// Base class for every error thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid construction or shape/geometry mismatch between arguments.
struct invalid_grid : error {
  using error::error;
};

// Padding or cropping width incompatible with the grid shape.
struct invalid_padding : error {
  using error::error;
};

// File format problems while reading or writing grids.
struct io_error : error {
  using error::error;
};

// Parameter values outside an operation's domain (lambda <= 0, bad scheme, ...).
struct invalid_parameters : error {
  using error::error;
};

// An operation that needs a non-empty cell set received an empty one.
struct empty_set : error {
  using error::error;
};

// Piecewise-affine data whose slopes are not increasing (not convex).
struct not_convex : error {
  using error::error;
};

// Dual grid of the biconjugate scheme does not cover the slope range of the input.
struct dual_coverage : error {
  using error::error;
};

// Stable feature transforms need lambda > tau; anything else collapses the map.
struct degenerate_parameters : error {
  using error::error;
};

// Extension level M must exceed the largest sample magnitude.
struct level_too_small : error {
  using error::error;
};

// An iterative scheme failed to reach its tolerance within the iteration budget.
struct numerical_failure : error {
  using error::error;
};

}  // namespace ccx
