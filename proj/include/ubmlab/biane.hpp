#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ubmlab/polar.hpp"

namespace ubmlab::biane {

// Edge angle Theta_t of the support [-Theta_t, Theta_t] for 0 <= t <= 4.
double theta_edge(double t);

// Gap between the two spectral edges, Delta_t = 2 (pi - Theta_t).
double gap(double t);

// F(w) = ((w - 1)/(w + 1)) e^{t w / 2}; the limiting transform w = f~(z, t)
// solves F(w) = z on the half-plane branch matching the side of the circle.
std::complex<double> implicit_F(std::complex<double> w, double t);
std::complex<double> implicit_F_prime(std::complex<double> w, double t);

// Zeros of (x+1)^2 - (x-1)^2 e^{t x} bracketing the interval where the
// boundary curve height k_t is real. x_plus > 1 always; x_minus = 0 for
// t <= 4 and lies in (0, 1) for t > 4.
double x_plus(double t);
double x_minus(double t);

// Height of the boundary curve of Gamma_t over x in [x_minus, x_plus];
// the 0/0 form at x -> 0 (t < 4) evaluates to sqrt(4/t - 1).
double boundary_k(double x, double t);

// Angle on the unit circle hit by the boundary point x + i k_t(x); decreases
// monotonically from the edge angle (or pi) at x_minus to 0 at x_plus.
double boundary_theta(double x, double t);

// Inverse of boundary_theta by bisection; theta in [0, edge angle].
double boundary_x_of_theta(double theta, double t);

// Limiting spectral density rho_t(theta); zero outside the support for t < 4.
double density(double theta, double t);

// Mass of rho_t over (-pi, theta].
double cdf(double theta, double t);

// Evaluator for the limiting Cauchy transform f~(z, t). Roots are found by
// homotopy in time from the explicit t = 0 transform, refined by damped
// Newton, and verified against the residual contract before being returned.
// The continuation seed makes sweeps over nearby query points cheap; contexts
// are value types, so parallel workers each take their own copy.
class LimitTransform {
public:
    explicit LimitTransform(double t, double tolerance = 1e-13, int step_budget = 400);

    std::complex<double> operator()(const PolarPoint& z) const;
    std::complex<double> operator()(std::complex<double> z) const;

    double t() const { return t_; }
    double tolerance() const { return tol_; }

private:
    std::complex<double> solve_inside(std::complex<double> z) const;
    std::complex<double> boundary_value(double theta) const;

    double t_;
    double tol_;
    int budget_;
    mutable bool has_seed_ = false;
    mutable std::complex<double> seed_z_{0.0, 0.0};
    mutable std::complex<double> seed_w_{1.0, 0.0};
};

// One-shot convenience wrapper.
std::complex<double> limiting_transform(const PolarPoint& z, double t);

// Parametric samples of the density with edge metadata.
struct DensityCurve {
    double t = 0.0;
    double edge = 0.0;      // Theta_t for t < 4, pi otherwise
    double gap = 0.0;       // Delta_t (0 for t >= 4)
    std::vector<double> theta;
    std::vector<double> rho;
    std::vector<double> source_x;  // Re of the producing boundary point (nan for padding)

    double trapezoid_mass() const;
};

DensityCurve density_curve(double t, std::size_t n = 2048);

// Quantile table: gamma_i solves CDF(gamma_i) = i/N, with gamma_N pinned to
// the right spectral edge (pi for t >= 4). Indices outside [1, N] resolve to
// the extended quantiles gamma_{i +- N} -+ ... shifted by full turns.
class QuantileTable {
public:
    QuantileTable(double t, std::size_t n, std::vector<double> gamma);

    double t() const { return t_; }
    std::size_t size() const { return gamma_.size(); }
    const std::vector<double>& values() const { return gamma_; }

    // 1-based index, extended beyond [1, N] by 2*pi shifts.
    double gamma(std::ptrdiff_t i) const;

private:
    double t_;
    std::size_t n_;
    std::vector<double> gamma_;
};

QuantileTable quantiles(double t, std::size_t n);

// Universal shape functions; cancellation-safe for extreme arguments.
double shape_psi_e(double lambda);
double shape_psi_m(double lambda);

struct EdgeShapePrediction {
    double numeric;
    double predicted;
};

// Density at Theta_t - E next to the pre-merge shape-function prediction.
EdgeShapePrediction edge_shape_check(double t, double E);

} // namespace ubmlab::biane
