#pragma once

#include <vector>

#include "halolab/linalg.hpp"

namespace halo {

// Singular values of a small dense matrix (intended for Jacobians up to 8x8),
// sorted descending. One-sided Jacobi iterated to machine precision; throws
// NumericalError if the sweep cap is hit.
std::vector<double> svd_small(const Mat& a);

inline double sigma_max(const Mat& a) { return svd_small(a).front(); }
inline double sigma_min(const Mat& a) { return svd_small(a).back(); }

}  // namespace halo
