#pragma once

#include "sphpack/core.hpp"

namespace sphpack {

/// Global quadratic attraction W(X) = (1/2N) sum_{i<j} |X_i - X_j|^2.
///
/// Both functions use the identity sum_{i<j} |X_i - X_j|^2 = N sum_i |X_i - m|^2
/// with m the centroid, so they run in O(N b).
double potential_value(const Configuration& x);

/// Gradient of W: component i is X_i - m. Components sum to zero.
Configuration potential_gradient(const Configuration& x);

/// Writes the gradient into `out` (same shape as x) without allocating.
void potential_gradient_into(const Configuration& x, Configuration& out);

/// Centroid of the configuration (b values).
std::vector<double> centroid(const Configuration& x);

}  // namespace sphpack
