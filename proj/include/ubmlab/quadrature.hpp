#pragma once

#include <cstddef>
#include <functional>

namespace ubmlab {

// 16-point Gauss-Legendre on [a, b].
double gauss_legendre_16(const std::function<double(double)>& f, double a, double b);

// Composite Gauss-Legendre with `panels` equal panels.
double gauss_legendre_composite(const std::function<double(double)>& f, double a, double b,
                                std::size_t panels);

// Adaptive Simpson to absolute tolerance; throws QuadratureError when the
// recursion depth runs out before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

} // namespace ubmlab
