#include "ubmlab/characteristics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "ubmlab/io.hpp"
#include "ubmlab/stats.hpp"

namespace ubmlab::chars {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::complex<double> characteristic_map(const PolarPoint& z, double s, double t) {
    if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("characteristic_map: need 0 <= s <= t");
    if (s == t) return z.to_complex();
    const std::complex<double> f = biane::limiting_transform(z, t);
    return z.to_complex() * std::exp(-0.5 * (t - s) * f);
}

double CharacteristicPath::max_f_drift_rel() const {
    const std::complex<double> f_end = f_values.back();
    double worst = 0.0;
    for (const auto& f : f_values)
        worst = std::max(worst, std::abs(f - f_end) / (1.0 + std::abs(f_end)));
    return worst;
}

double CharacteristicPath::max_radial_residual() const {
    double worst = 0.0;
    for (double r : radial_residual) worst = std::max(worst, r);
    return worst;
}

double CharacteristicPath::max_abs_point() const {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, std::abs(p));
    return worst;
}

void CharacteristicPath::write_csv(std::ostream& os) const {
    os << "s,re,im,log_r,kappa,eta,f_re,f_im\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        os << io::fmt17(s[k]) << ',' << io::fmt17(points[k].real()) << ','
           << io::fmt17(points[k].imag()) << ',' << io::fmt17(std::log(std::abs(points[k])))
           << ',' << io::fmt17(kappa[k]) << ',' << io::fmt17(eta[k]) << ','
           << io::fmt17(f_values[k].real()) << ',' << io::fmt17(f_values[k].imag()) << '\n';
    }
}

CharacteristicPath characteristic_path(const PolarPoint& z, double t, std::size_t m) {
    if (m < 2) throw std::invalid_argument("characteristic_path: m >= 2 required");
    if (!(t > 0.0)) throw std::invalid_argument("characteristic_path: t must be > 0");
    CharacteristicPath path;
    path.terminal = z;
    path.t_final = t;
    const std::complex<double> f_end = biane::limiting_transform(z, t);
    const std::complex<double> zc = z.to_complex();

    path.s.resize(m + 1);
    path.points.resize(m + 1);
    path.f_values.resize(m + 1);
    path.kappa.resize(m + 1);
    path.eta.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        const double s_k = t * static_cast<double>(k) / static_cast<double>(m);
        path.s[k] = s_k;
        path.points[k] = zc * std::exp(-0.5 * (t - s_k) * f_end);
        const PolarPoint p = PolarPoint::from_complex(path.points[k]);
        path.f_values[k] = biane::limiting_transform(p, s_k);
        path.eta[k] = p.eta();
        path.kappa[k] = (s_k > 0.0 && s_k < 4.0)
                            ? std::abs(p.theta) - biane::theta_edge(s_k)
                            : std::numeric_limits<double>::quiet_NaN();
    }
    // central-difference check of d/ds log|z_s| = -|Re f~(z_s, s)|/2 (for
    // exterior paths Re f~ < 0, so the two statements agree in sign)
    path.radial_residual.assign(m + 1, 0.0);
    for (std::size_t k = 1; k < m; ++k) {
        const double h = path.s[k + 1] - path.s[k - 1];
        const double fd =
            (std::log(std::abs(path.points[k + 1])) - std::log(std::abs(path.points[k - 1]))) / h;
        const double expected = z.r > 1.0 ? -0.5 * std::abs(path.f_values[k].real())
                                          : 0.5 * std::abs(path.f_values[k].real());
        path.radial_residual[k] = std::abs(fd - expected);
    }
    return path;
}

double rk4_closed_form_gap(const PolarPoint& z, double t, double step) {
    if (!(t > 0.0)) throw std::invalid_argument("rk4_closed_form_gap: t must be > 0");
    // integrate dz/ds = z f~(z, s)/2 backwards from s = t to s = 0
    auto rhs = [](std::complex<double> w, double s) {
        return 0.5 * w * biane::limiting_transform(PolarPoint::from_complex(w), s);
    };
    std::complex<double> w = z.to_complex();
    double s = t;
    while (s > 0.0) {
        const double h = std::min(step, s);
        const std::complex<double> k1 = rhs(w, s);
        const std::complex<double> k2 = rhs(w - 0.5 * h * k1, s - 0.5 * h);
        const std::complex<double> k3 = rhs(w - 0.5 * h * k2, s - 0.5 * h);
        const std::complex<double> k4 = rhs(w - h * k3, s - h);
        w -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s -= h;
    }
    return std::abs(w - characteristic_map(z, 0.0, t));
}

CuspDecayReport cusp_angular_decay_check(const PolarPoint& z, double t, std::size_t m) {
    CuspDecayReport report;
    if (!(t > 3.5 && t < 4.0)) {
        report.applicable = false;
        report.status = "outside near-cusp regime (need 3.5 < t < 4)";
        return report;
    }
    const double kappa_t = std::abs(z.theta) - biane::theta_edge(t);
    if (kappa_t < 0.0) {
        report.applicable = false;
        report.status = "endpoint inside the support arc (kappa_t < 0)";
        return report;
    }
    const CharacteristicPath path = characteristic_path(z, t, m);

    // validity window: stay within eta_s <= a Delta_s of the circle and inside
    // the near-cusp era s > 3.5
    const double a_window = 0.5;
    std::vector<double> xs, ys;
    bool monotone = true;
    double prev_kappa = -1.0;
    for (std::size_t k = 0; k < path.s.size(); ++k) {
        const double s_k = path.s[k];
        if (!(s_k > 3.5) || s_k >= 4.0) continue;
        const double delta_s = biane::gap(s_k);
        const double kappa_s = std::abs(std::arg(path.points[k])) - biane::theta_edge(s_k);
        const double eta_s = std::abs(path.points[k]) - 1.0;
        if (kappa_s < 0.0 || eta_s > a_window * delta_s) continue;
        xs.push_back(t - s_k);
        ys.push_back(std::pow(delta_s, 1.0 / 6.0) * std::sqrt(kappa_s));
        // samples arrive with s increasing; kappa_s must shrink toward s = t
        if (prev_kappa >= 0.0 && kappa_s > prev_kappa + 1e-13) monotone = false;
        prev_kappa = kappa_s;
    }
    report.window_samples = xs.size();
    if (xs.size() < 3) {
        report.applicable = false;
        report.status = "path left the validity window before enough samples";
        return report;
    }
    report.applicable = true;
    report.status = "ok";
    report.kappa_monotone = monotone;
    const LinearFit fit = linear_fit(xs, ys);
    report.fitted_slope = fit.slope;
    report.fit_r2 = fit.r2;
    report.time_back = std::move(xs);
    report.scaled_kappa = std::move(ys);
    return report;
}

} // namespace ubmlab::chars
