#include "ubmlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ubmlab/cauchy.hpp"
#include "ubmlab/errors.hpp"
#include "ubmlab/io.hpp"
#include "ubmlab/stats.hpp"

namespace ubmlab::verify {

namespace {
constexpr double kPi = std::numbers::pi;

// Gauss-Legendre 4-point nodes on [-1, 1].
constexpr double kGl4X[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                             0.8611363115940526};
constexpr double kGl4W[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                             0.3478548451374538};

double quintic_smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double quintic_smoothstep_prime(double u) {
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}

double chi_base(double r) {
    if (r <= 0.5 || r >= 2.0) return 0.0;
    if (r < 0.75) return quintic_smoothstep(4.0 * r - 2.0);
    if (r <= 4.0 / 3.0) return 1.0;
    return quintic_smoothstep(3.0 - 1.5 * r);
}

double chi_base_prime(double r) {
    if (r <= 0.5 || r >= 2.0) return 0.0;
    if (r < 0.75) return 4.0 * quintic_smoothstep_prime(4.0 * r - 2.0);
    if (r <= 4.0 / 3.0) return 0.0;
    return -1.5 * quintic_smoothstep_prime(3.0 - 1.5 * r);
}

} // namespace

double hs_chi(double r) { return 0.5 * (chi_base(r) + chi_base(1.0 / r)); }

double hs_chi_prime(double r) {
    return 0.5 * (chi_base_prime(r) - chi_base_prime(1.0 / r) / (r * r));
}

LocalLawGrid local_law_check(const EigenAngleConfig& angles, double t, double delta,
                             double frak_c, double eps, std::size_t n_radial,
                             std::size_t n_angular) {
    if (!(t > 0.0)) throw std::invalid_argument("local_law_check: t > 0 required");
    LocalLawGrid grid;
    grid.t = t;
    grid.n_particles = angles.size();
    grid.delta = delta;
    grid.frak_c = frak_c;
    grid.eps = eps;

    const double n = static_cast<double>(angles.size());
    const double log_r_lo = std::pow(n, -frak_c);
    const double log_r_hi = 5.0;
    const double n_delta = std::pow(n, delta);
    const double bound = std::pow(n, eps);
    biane::LimitTransform limit(t);

    std::size_t pass_count = 0;
    for (std::size_t i = 0; i < n_radial; ++i) {
        // geometric spacing concentrates points near the circle
        const double frac = n_radial == 1 ? 0.0
                                          : static_cast<double>(i) / static_cast<double>(n_radial - 1);
        const double log_r = log_r_lo * std::pow(log_r_hi / log_r_lo, frac);
        const double r = std::exp(log_r);
        for (std::size_t j = 0; j < n_angular; ++j) {
            const double theta =
                -kPi + 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(n_angular);
            const PolarPoint z(r, theta);
            const std::complex<double> ft = limit(z);
            const double membership = std::max(n_delta / (n * std::abs(ft.real())), log_r_lo);
            if (!(log_r > membership) || !(log_r < log_r_hi)) continue;
            const std::complex<double> f = empirical_cauchy_transform(angles, z);
            LocalLawPoint p;
            p.log_r = log_r;
            p.theta = theta;
            p.scaled_error = std::abs(f - ft) * n * log_r;
            p.pass = p.scaled_error <= bound;
            pass_count += p.pass ? 1 : 0;
            grid.max_scaled_error = std::max(grid.max_scaled_error, p.scaled_error);
            grid.points.push_back(p);
        }
    }
    grid.empty = grid.points.empty();
    grid.pass_fraction =
        grid.empty ? 0.0 : static_cast<double>(pass_count) / static_cast<double>(grid.points.size());
    return grid;
}

std::string RigidityReport::to_json() const {
    nlohmann::json j;
    j["schema"] = "ubm-report/1";
    j["suite"] = suite;
    j["t"] = t;
    j["n"] = n_particles;
    j["eps"] = eps;
    j["trials"] = trials;
    j["pass_fraction"] = pass_fraction;
    j["required_fraction"] = required_fraction;
    j["pass"] = pass;
    j["per_trial_stat"] = per_trial_stat;
    for (const auto& [k, v] : extra) j["extra"][k] = v;
    return j.dump(2) + "\n";
}

void RigidityReport::write_csv(std::ostream& os) const {
    os << "trial,stat,value\n";
    for (std::size_t i = 0; i < per_trial_stat.size(); ++i)
        os << i << ',' << suite << "_stat," << io::fmt17(per_trial_stat[i]) << '\n';
}

RigidityReport edge_rigidity_check(const std::vector<EigenAngleConfig>& trials, double t,
                                   double eps, double required_fraction) {
    if (trials.empty()) throw std::invalid_argument("edge_rigidity_check: no trials");
    RigidityReport rep;
    rep.suite = "edge";
    rep.t = t;
    rep.n_particles = trials.front().size();
    rep.eps = eps;
    rep.trials = trials.size();
    rep.required_fraction = required_fraction;

    const double n = static_cast<double>(rep.n_particles);
    const double edge = biane::theta_edge(t);
    const bool short_time = t <= 0.1;
    const double window = short_time ? std::pow(n, -eps / 6.0) : std::pow(n, -2.0 / 3.0 + eps);
    const double scale = std::pow(n, 2.0 / 3.0);

    std::size_t ok = 0;
    std::vector<double> abs_excess;
    for (const auto& cfg : trials) {
        double theta_absmax = 0.0;
        for (double a : cfg.principal()) theta_absmax = std::max(theta_absmax, std::abs(a));
        const double excess = theta_absmax - edge;
        rep.per_trial_stat.push_back(excess * scale);
        abs_excess.push_back(std::abs(excess) * scale);
        if (theta_absmax <= edge + window) ++ok;
    }
    rep.pass_fraction = static_cast<double>(ok) / static_cast<double>(rep.trials);
    rep.pass = rep.pass_fraction >= required_fraction;
    rep.extra["window"] = window;
    rep.extra["median_excess_scaled"] = median(rep.per_trial_stat);
    rep.extra["median_abs_excess_scaled"] = median(abs_excess);
    return rep;
}

RigidityReport cusp_rigidity_check(const std::vector<EigenAngleConfig>& trials, double t,
                                   double eps, double required_fraction) {
    if (trials.empty()) throw std::invalid_argument("cusp_rigidity_check: no trials");
    if (!(t > 2.0 && t < 4.0)) throw std::invalid_argument("cusp_rigidity_check: need 2 < t < 4");
    RigidityReport rep;
    rep.suite = "cusp";
    rep.t = t;
    rep.n_particles = trials.front().size();
    rep.eps = eps;
    rep.trials = trials.size();
    rep.required_fraction = required_fraction;

    const double n = static_cast<double>(rep.n_particles);
    const double edge = biane::theta_edge(t);
    const double delta_t = biane::gap(t);
    // scale sanity: the near-cusp regime needs 4 - t above the N^{-1/2}
    // threshold where the edge fluctuation scale overtakes the gap
    if (4.0 - t < 1.0 / std::sqrt(n))
        throw std::invalid_argument("cusp_rigidity_check: 4 - t below the N^{-1/2} scale");
    const double window = std::pow(delta_t, 1.0 / 9.0) * std::pow(n, -2.0 / 3.0 + eps);
    const double scale = std::pow(n, 2.0 / 3.0) / std::pow(delta_t, 1.0 / 9.0);
    const double bound = std::pow(n, eps);
    const std::size_t split = static_cast<std::size_t>(
        std::ceil(n * (4.0 - t) * (4.0 - t)));

    const biane::QuantileTable table = biane::quantiles(t, rep.n_particles);
    std::size_t ok = 0;
    double regime1_max = 0.0, regime2_max = 0.0;
    std::size_t regime1_ok = 0, regime2_ok = 0;
    std::vector<double> abs_excess;
    for (const auto& cfg : trials) {
        const auto sorted = cfg.angles();
        double theta_absmax = 0.0;
        for (double a : cfg.principal()) theta_absmax = std::max(theta_absmax, std::abs(a));
        const double excess = theta_absmax - edge;
        rep.per_trial_stat.push_back(excess * scale);
        abs_excess.push_back(std::abs(excess) * scale);
        if (theta_absmax <= edge + window) ++ok;

        double r1 = 0.0, r2 = 0.0;
        for (std::size_t i = 1; i <= cfg.size(); ++i) {
            const std::size_t ieff = std::min(i, cfg.size() + 1 - i);
            const double err = std::abs(sorted[i - 1] - table.gamma(static_cast<std::ptrdiff_t>(i)));
            const double di = static_cast<double>(ieff);
            if (ieff <= split) {
                r1 = std::max(err / (std::pow(4.0 - t, 1.0 / 6.0) *
                                     std::pow(n, -2.0 / 3.0) * std::pow(di, -1.0 / 3.0)),
                              r1);
            } else {
                r2 = std::max(err / (std::pow(n, -3.0 / 4.0) * std::pow(di, -1.0 / 4.0)), r2);
            }
        }
        regime1_max = std::max(regime1_max, r1);
        regime2_max = std::max(regime2_max, r2);
        regime1_ok += r1 <= bound ? 1 : 0;
        regime2_ok += r2 <= bound ? 1 : 0;
    }
    rep.pass_fraction = static_cast<double>(ok) / static_cast<double>(rep.trials);
    rep.pass = rep.pass_fraction >= required_fraction;
    rep.extra["window"] = window;
    rep.extra["delta_t"] = delta_t;
    rep.extra["index_split"] = static_cast<double>(split);
    rep.extra["median_excess_scaled"] = median(rep.per_trial_stat);
    rep.extra["median_abs_excess_scaled"] = median(abs_excess);
    rep.extra["regime1_max_ratio"] = regime1_max;
    rep.extra["regime2_max_ratio"] = regime2_max;
    rep.extra["regime1_pass_fraction"] =
        static_cast<double>(regime1_ok) / static_cast<double>(rep.trials);
    rep.extra["regime2_pass_fraction"] =
        static_cast<double>(regime2_ok) / static_cast<double>(rep.trials);
    return rep;
}

RigidityReport quantile_rigidity_check(const std::vector<EigenAngleConfig>& trials, double t,
                                       double eps, double required_fraction) {
    if (trials.empty()) throw std::invalid_argument("quantile_rigidity_check: no trials");
    RigidityReport rep;
    rep.suite = "quantile";
    rep.t = t;
    rep.n_particles = trials.front().size();
    rep.eps = eps;
    rep.trials = trials.size();
    rep.required_fraction = required_fraction;

    const double n = static_cast<double>(rep.n_particles);
    const double bound = std::pow(n, eps);
    const biane::QuantileTable table = biane::quantiles(t, rep.n_particles);
    const bool bulk_mode = t >= 4.2;
    const auto k_shift = static_cast<std::ptrdiff_t>(std::ceil(bound));

    std::size_t ok = 0;
    // per-index scaled errors accumulated for the symmetry diagnostic
    std::vector<double> mean_scaled(rep.n_particles, 0.0);
    for (const auto& cfg : trials) {
        const auto& sorted = cfg.angles();
        double worst = 0.0;
        if (!bulk_mode) {
            for (std::size_t i = 1; i <= cfg.size(); ++i) {
                const double di = static_cast<double>(std::min(i, cfg.size() + 1 - i));
                const double scaled =
                    std::abs(sorted[i - 1] - table.gamma(static_cast<std::ptrdiff_t>(i))) *
                    std::pow(n, 2.0 / 3.0) * std::cbrt(di);
                worst = std::max(worst, scaled);
                mean_scaled[i - 1] += scaled;
            }
            if (worst <= bound) ++ok;
        } else {
            // extended-quantile sandwich; worst = largest violation (<= 0 passes)
            for (std::size_t i = 1; i <= cfg.size(); ++i) {
                const auto idx = static_cast<std::ptrdiff_t>(i);
                const double lo = table.gamma(idx - k_shift);
                const double hi = table.gamma(idx + k_shift);
                worst = std::max({worst, lo - sorted[i - 1], sorted[i - 1] - hi});
            }
            if (worst <= 0.0) ++ok;
        }
        rep.per_trial_stat.push_back(worst);
    }
    rep.pass_fraction = static_cast<double>(ok) / static_cast<double>(rep.trials);
    rep.pass = rep.pass_fraction >= required_fraction;
    if (!bulk_mode) {
        // sign test of the i <-> N+1-i symmetry of the mean scaled profile
        std::size_t plus = 0, nonzero = 0;
        for (std::size_t i = 1; 2 * i < rep.n_particles; ++i) {
            const double d = mean_scaled[i - 1] - mean_scaled[rep.n_particles - i];
            if (d != 0.0) {
                ++nonzero;
                if (d > 0.0) ++plus;
            }
        }
        rep.extra["symmetry_sign_p"] = sign_test_pvalue(plus, nonzero);
    }
    rep.extra["bulk_mode"] = bulk_mode ? 1.0 : 0.0;
    return rep;
}

IntervalCount interval_count_check(const EigenAngleConfig& angles, double t, double a, double b) {
    if (!(t > 0.0)) throw std::invalid_argument("interval_count_check: t > 0 required");
    if (!(b >= a)) throw std::invalid_argument("interval_count_check: need a <= b");
    IntervalCount out;
    out.count = angles.count_in_interval(a, b);
    const double n = static_cast<double>(angles.size());
    if (b - a >= 2.0 * kPi) {
        out.predicted = n;
    } else {
        const double fa = principal_angle(a), fb = principal_angle(b);
        double mass = biane::cdf(fb, t) - biane::cdf(fa, t);
        if (fa > fb) mass += 1.0;
        out.predicted = n * mass;
    }
    out.discrepancy = std::abs(static_cast<double>(out.count) - out.predicted);
    return out;
}

double hs_functional(const std::function<double(double)>& phi,
                     const std::function<double(double)>& phi_prime,
                     const std::function<double(double)>& phi_second,
                     const std::function<std::complex<double>(const PolarPoint&)>& transform,
                     const HsOptions& options) {
    const double seg[5] = {0.5, 0.75, 1.0, 4.0 / 3.0, 2.0};

    auto evaluate = [&](std::size_t mesh) {
        const std::size_t n_theta = 8 * mesh;
        const double dtheta = 2.0 * kPi / static_cast<double>(n_theta);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t s = 0; s < 4; ++s) {
            const double a = seg[s], b = seg[s + 1];
            const double h = (b - a) / static_cast<double>(mesh);
            for (std::size_t p = 0; p < mesh; ++p) {
                const double lo = a + h * static_cast<double>(p);
                for (int q = 0; q < 4; ++q) {
                    const double r = lo + 0.5 * h * (1.0 + kGl4X[q]);
                    const double wr = 0.5 * h * kGl4W[q];
                    const double chi = hs_chi(r);
                    const double chi_p = hs_chi_prime(r);
                    const double lr = std::log(r);
                    if (chi == 0.0 && chi_p == 0.0) continue;
                    for (std::size_t k = 0; k < n_theta; ++k) {
                        const double theta = -kPi + dtheta * (static_cast<double>(k) + 0.5);
                        const std::complex<double> f = transform(PolarPoint(r, theta));
                        const std::complex<double> quasi(phi(theta), -lr * phi_prime(theta));
                        acc += wr * dtheta * (quasi * chi_p + phi_second(theta) * lr * chi / r) * f;
                    }
                }
            }
        }
        return acc / (4.0 * kPi);
    };

    if (!options.adaptive) return evaluate(options.initial_mesh).real();
    std::complex<double> prev = evaluate(options.initial_mesh);
    double last_diff = std::numeric_limits<double>::infinity();
    for (std::size_t mesh = 2 * options.initial_mesh; mesh <= options.max_mesh; mesh *= 2) {
        const std::complex<double> next = evaluate(mesh);
        last_diff = std::abs(next - prev);
        if (last_diff <= options.tol * (1.0 + std::abs(next))) return next.real();
        prev = next;
    }
    throw QuadratureError("hs_functional: quadrature did not converge", last_diff);
}

} // namespace ubmlab::verify
