#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace ubmlab {

// Normalize an angle to the principal branch (-pi, pi].
inline double principal_angle(double theta) {
    const double two_pi = 2.0 * std::numbers::pi;
    double a = std::remainder(theta, two_pi);  // (-pi, pi] up to the -pi tie
    if (a <= -std::numbers::pi) a += two_pi;
    return a;
}

// A point z = r e^{i theta} off (or on) the unit circle, with the radial
// excess eta = r - 1 and log-radius kept consistent with r.
struct PolarPoint {
    double r;
    double theta;  // principal value in (-pi, pi]

    PolarPoint(double radius, double angle) : r(radius), theta(principal_angle(angle)) {
        if (!(radius > 0.0)) throw std::invalid_argument("PolarPoint: radius must be > 0");
    }

    static PolarPoint from_complex(std::complex<double> z) {
        return PolarPoint(std::abs(z), std::arg(z));
    }

    double eta() const { return r - 1.0; }
    double log_r() const { return std::log(r); }
    std::complex<double> to_complex() const { return std::polar(r, theta); }
};

// Radial and angular distance from the spectral edge: eta = r - 1 and
// kappa = |theta| - Theta_t. kappa < 0 means the angle is inside the support.
struct EdgeCoordinates {
    double eta;
    double kappa;
};

// Control parameter B(z); the branch flag records which regime produced it.
struct ControlParameter {
    double value;
    bool exterior;  // true for the kappa > 0 branch
};

// kappa/eta coordinates for z relative to the time-t edge. Requires 0 < t < 4.
EdgeCoordinates edge_coordinates(const PolarPoint& z, double t);

// B = 1/(N sqrt((kappa+eta) eta)) outside the edge (kappa > 0), 1/(N eta)
// inside (kappa < 0); the two branches agree at kappa = 0.
ControlParameter control_parameter(const EdgeCoordinates& coords, std::size_t n_particles);

} // namespace ubmlab
