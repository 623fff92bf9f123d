#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ubmlab/biane.hpp"
#include "ubmlab/eigen_config.hpp"
#include "ubmlab/polar.hpp"

namespace ubmlab::verify {

struct LocalLawPoint {
    double log_r = 0.0;
    double theta = 0.0;
    double scaled_error = 0.0;  // |f - f~| N log|z|
    bool pass = false;
};

struct LocalLawGrid {
    double t = 0.0;
    std::size_t n_particles = 0;
    double delta = 0.1;
    double frak_c = 0.05;
    double eps = 0.3;
    std::vector<LocalLawPoint> points;  // only points inside B_t
    double max_scaled_error = 0.0;
    double pass_fraction = 0.0;   // fraction with scaled error <= N^eps
    bool empty = true;            // no grid point survived the B_t filter
};

LocalLawGrid local_law_check(const EigenAngleConfig& angles, double t, double delta,
                             double frak_c, double eps, std::size_t n_radial = 40,
                             std::size_t n_angular = 80);

struct RigidityReport {
    std::string suite;
    double t = 0.0;
    std::size_t n_particles = 0;
    double eps = 0.3;
    std::size_t trials = 0;
    double pass_fraction = 0.0;
    bool pass = false;            // pass_fraction >= required_fraction
    double required_fraction = 0.95;
    std::vector<double> per_trial_stat;  // suite-specific scalar per trial
    std::map<std::string, double> extra;

    std::string to_json() const;
    void write_csv(std::ostream& os) const;  // trial,stat,value
};

// Theorem-style edge window test: no eigenangle beyond Theta_t + N^{-2/3+eps}
// (window N^{-eps/6} in the short-time regime t <= 0.1). per_trial_stat holds
// (theta_max - Theta_t) N^{2/3}.
RigidityReport edge_rigidity_check(const std::vector<EigenAngleConfig>& trials, double t,
                                   double eps, double required_fraction = 0.95);

// Near-cusp variant with window Delta_t^{1/9} N^{-2/3+eps}; also evaluates the
// two-regime quantile bounds with the index split at N (4-t)^2.
RigidityReport cusp_rigidity_check(const std::vector<EigenAngleConfig>& trials, double t,
                                   double eps, double required_fraction = 0.9);

// Quantile rigidity: max_i |theta_i - gamma_i| N^{2/3} min(i, N+1-i)^{1/3}
// against N^eps. For t >= 4.2 uses the extended-quantile sandwich instead.
RigidityReport quantile_rigidity_check(const std::vector<EigenAngleConfig>& trials, double t,
                                       double eps, double required_fraction = 0.95);

// Exact count of angles in the half-open arc (a, b] next to N * rho_t((a, b]).
struct IntervalCount {
    std::size_t count = 0;
    double predicted = 0.0;
    double discrepancy = 0.0;
};

IntervalCount interval_count_check(const EigenAngleConfig& angles, double t, double a, double b);

// C^2 bump used by the Helffer-Sjostrand integral: 1 on [3/4, 4/3], 0 outside
// [1/2, 2], symmetric under r -> 1/r (quintic spline ramps, then symmetrized).
double hs_chi(double r);
double hs_chi_prime(double r);

struct HsOptions {
    double tol = 5e-7;
    std::size_t initial_mesh = 4;   // panels per radial segment; angular nodes scale with it
    std::size_t max_mesh = 1024;
    bool adaptive = true;           // false: evaluate at initial_mesh only
};

// Two-term Helffer-Sjostrand functional: recovers int phi dmu from a Cauchy
// transform evaluator. phi must be 2*pi periodic with two derivatives.
double hs_functional(const std::function<double(double)>& phi,
                     const std::function<double(double)>& phi_prime,
                     const std::function<double(double)>& phi_second,
                     const std::function<std::complex<double>(const PolarPoint&)>& transform,
                     const HsOptions& options = {});

} // namespace ubmlab::verify
