#pragma once

#include <complex>
#include <utility>

#include "ubmlab/eigen_config.hpp"
#include "ubmlab/polar.hpp"

namespace ubmlab {

// Minimum |r - 1| accepted by the empirical transform; closer queries are
// rejected as ill-conditioned rather than silently evaluated.
inline constexpr double kRadiusFloor = 1e-12;

// f(z) = (1/N) sum_i (e^{i theta_i} + z) / (e^{i theta_i} - z), accumulated by
// pairwise (tree) summation. Re f has sign opposite to sign(r - 1).
std::complex<double> empirical_cauchy_transform(const EigenAngleConfig& angles,
                                                const PolarPoint& z);

// Two routes to Re f: the complex sum and (1/N) sum (1 - |z|^2)/|lambda_i - z|^2.
// Returned as (lhs, rhs); they agree to ~1e-12 relative.
std::pair<double, double> real_part_identity(const EigenAngleConfig& angles,
                                             const PolarPoint& z);

} // namespace ubmlab
