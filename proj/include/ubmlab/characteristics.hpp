#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ubmlab/biane.hpp"
#include "ubmlab/polar.hpp"

namespace ubmlab::chars {

// C_{s,t}(z) = z exp[-(t-s) f~(z,t)/2]; C_{t,t}(z) = z exactly.
std::complex<double> characteristic_map(const PolarPoint& z, double s, double t);

struct CharacteristicPath {
    PolarPoint terminal;
    double t_final = 0.0;
    std::vector<double> s;                        // s_0 < ... < s_m = t
    std::vector<std::complex<double>> points;     // z_{s_k}
    std::vector<std::complex<double>> f_values;   // f~(z_{s_k}, s_k)
    std::vector<double> radial_residual;          // |FD of log|z_s| + |Re f~|/2| at interior samples
    std::vector<double> kappa;                    // |arg z_s| - Theta_s (nan when s outside [0,4])
    std::vector<double> eta;

    CharacteristicPath() : terminal(1.0, 0.0) {}

    double max_f_drift_rel() const;   // max_k |f_k - f_m| / (1 + |f_m|)
    double max_radial_residual() const;
    double max_abs_point() const;

    // CSV columns: s,re,im,log_r,kappa,eta,f_re,f_im
    void write_csv(std::ostream& os) const;
};

// Samples C_{s,t}(z) on a uniform m+1 point grid over [0, t].
CharacteristicPath characteristic_path(const PolarPoint& z, double t, std::size_t m);

// Cross-check mode: integrate dz/ds = z f~(z,s)/2 backwards from (z, t) with
// RK4 and report the terminal gap against the closed-form map.
double rk4_closed_form_gap(const PolarPoint& z, double t, double step = 1e-3);

struct CuspDecayReport {
    bool applicable = false;     // false when t is outside the near-cusp regime
    std::string status;
    double fitted_slope = 0.0;   // slope of Delta_s^{1/6} sqrt(kappa_s) in (t - s)
    double fit_r2 = 0.0;
    bool kappa_monotone = false; // kappa_s nonincreasing toward s = t
    std::size_t window_samples = 0;
    std::vector<double> time_back;    // t - s within the validity window
    std::vector<double> scaled_kappa; // Delta_s^{1/6} sqrt(kappa_s)
};

// Tracks Delta_s^{1/6} sqrt(kappa_s) backward in time for a path ending near
// the cusp-era edge; reports the fitted linear growth rate.
CuspDecayReport cusp_angular_decay_check(const PolarPoint& z, double t, std::size_t m = 64);

} // namespace ubmlab::chars
