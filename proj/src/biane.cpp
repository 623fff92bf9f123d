#include "ubmlab/biane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ubmlab/errors.hpp"
#include "ubmlab/quadrature.hpp"

namespace ubmlab::biane {

namespace {

constexpr double kPi = std::numbers::pi;

// Sign function h(x) = t x - 2 log((x+1)/(x-1)) for x > 1; x_plus is its root.
double bracket_fn_plus(double x, double t) { return t * x - 4.0 * std::atanh(1.0 / x); }

// t x - 2 log((1+x)/(1-x)) on (0, 1); x_minus is the interior root for t > 4.
double bracket_fn_minus(double x, double t) { return t * x - 4.0 * std::atanh(x); }

} // namespace

double theta_edge(double t) {
    if (!(t >= 0.0 && t <= 4.0)) throw std::invalid_argument("theta_edge: t must be in [0, 4]");
    return 0.5 * std::sqrt((4.0 - t) * t) + 2.0 * std::asin(std::sqrt(0.25 * t));
}

double gap(double t) { return 2.0 * (kPi - theta_edge(t)); }

std::complex<double> implicit_F(std::complex<double> w, double t) {
    return (w - 1.0) / (w + 1.0) * std::exp(0.5 * t * w);
}

std::complex<double> implicit_F_prime(std::complex<double> w, double t) {
    const std::complex<double> wp1 = w + 1.0;
    return std::exp(0.5 * t * w) * (2.0 / (wp1 * wp1) + 0.5 * t * (w - 1.0) / wp1);
}

double x_plus(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("x_plus: t must be > 0");
    double lo = 1.0 + 1e-14;
    double hi = std::max(2.0, 4.0 / std::sqrt(t));
    int guard = 0;
    while (bracket_fn_plus(hi, t) < 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw SolverError("x_plus: bracket failure", bracket_fn_plus(hi, t));
    }
    if (!(bracket_fn_plus(lo, t) < 0.0))
        throw SolverError("x_plus: bracket failure at lower end", bracket_fn_plus(lo, t));
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bracket_fn_plus(mid, t) < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {  // Newton polish; h'(x) = t + 4/(x^2-1)
        const double h = bracket_fn_plus(x, t);
        const double hp = t + 4.0 / (x * x - 1.0);
        const double step = h / hp;
        if (!std::isfinite(step)) break;
        x -= step;
        if (x <= 1.0) x = 0.5 * (lo + hi);
    }
    return x;
}

double x_minus(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("x_minus: t must be > 0");
    if (t <= 4.0) return 0.0;
    double lo = 1e-12;
    double hi = 1.0 - 1e-15;
    if (!(bracket_fn_minus(lo, t) > 0.0) || !(bracket_fn_minus(hi, t) < 0.0))
        throw SolverError("x_minus: bracket failure", bracket_fn_minus(lo, t));
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bracket_fn_minus(mid, t) > 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double h = bracket_fn_minus(x, t);
        const double hp = t - 4.0 / (1.0 - x * x);
        const double step = h / hp;
        if (!std::isfinite(step)) break;
        const double xn = x - step;
        if (xn > 0.0 && xn < 1.0) x = xn;
    }
    return x;
}

double boundary_k(double x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("boundary_k: t must be > 0");
    if (x < 0.0 || (t > 4.0 && x < x_minus(t) * (1.0 - 1e-12)))
        throw std::invalid_argument("boundary_k: x below the root interval");
    if (x == 0.0) {
        if (t > 4.0) throw std::invalid_argument("boundary_k: x below the root interval");
        return std::sqrt(4.0 / t - 1.0);
    }
    // ((x+1)^2 - (x-1)^2 e^{tx}) / (e^{tx} - 1) = 4x/expm1(tx) - (x-1)^2,
    // which is stable through the removable singularity at x = 0.
    const double k2 = 4.0 * x / std::expm1(t * x) - (x - 1.0) * (x - 1.0);
    if (k2 < 0.0) {
        if (k2 > -1e-12) return 0.0;  // roundoff at the interval ends
        throw std::invalid_argument("boundary_k: x outside the root interval");
    }
    return std::sqrt(k2);
}

double boundary_theta(double x, double t) {
    const double k = boundary_k(x, t);
    const std::complex<double> w(x, k);
    // arg F(w) with F(w) = ((w-1)/(w+1)) e^{tw/2}; |F| = 1 on the curve and the
    // image angle stays in [0, pi], so no unwrapping is needed.
    return std::arg((w - 1.0) / (w + 1.0)) + 0.5 * t * k;
}

double boundary_x_of_theta(double theta, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("boundary_x_of_theta: t must be > 0");
    const double edge = t < 4.0 ? theta_edge(t) : kPi;
    if (!(theta >= 0.0 && theta <= edge))
        throw std::invalid_argument("boundary_x_of_theta: theta outside [0, edge]");
    double lo = x_minus(t), hi = x_plus(t);
    if (theta == 0.0) return hi;
    for (int i = 0; i < 110 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (boundary_theta(mid, t) > theta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double density(double theta, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("density: t must be > 0");
    const double a = std::abs(principal_angle(theta));
    if (t < 4.0) {
        if (a >= theta_edge(t)) return 0.0;
    } else if (a >= kPi) {
        return x_minus(t) / (2.0 * kPi);
    }
    return boundary_x_of_theta(a, t) / (2.0 * kPi);
}

// ---------------------------------------------------------------------------
// Mass profile: integrals of rho_t in the boundary parametrization. With
// w(x) = x + i k_t(x) and theta(x) = arg F(w(x)), the mass above theta(x) is
//   (1/2pi) [ x_- theta(x_-) - x theta(x) + int_{x_-}^{x} theta(xi) dxi ],
// and the substitution xi = x_- + (x_+ - x_-)(1 - cos(pi v))/2 removes the
// square-root endpoints, leaving an analytic integrand for fixed-order panels.

namespace {

class MassProfile {
public:
    explicit MassProfile(double t)
        : t_(t), xm_(x_minus(t)), xp_(x_plus(t)), edge_(t < 4.0 ? theta_edge(t) : kPi) {
        prefix_.resize(kPanels + 1, 0.0);
        for (std::size_t k = 0; k < kPanels; ++k) {
            const double v0 = static_cast<double>(k) / kPanels;
            const double v1 = static_cast<double>(k + 1) / kPanels;
            prefix_[k + 1] =
                prefix_[k] + gauss_legendre_16([this](double v) { return integrand(v); }, v0, v1);
        }
    }

    double t() const { return t_; }
    double edge() const { return edge_; }
    double x_lo() const { return xm_; }
    double x_hi() const { return xp_; }

    double theta_integral(double x) const {
        const double v = v_of_x(x);
        const double scaled = v * kPanels;
        const std::size_t k = std::min(static_cast<std::size_t>(scaled), kPanels - 1);
        const double v0 = static_cast<double>(k) / kPanels;
        return prefix_[k] +
               gauss_legendre_16([this](double u) { return integrand(u); }, v0, v);
    }

    // Mass of rho_t over (theta(x), edge].
    double mass_above(double x) const {
        const double th = x >= xp_ ? 0.0 : boundary_theta(x, t_);
        return (xm_ * edge_ - x * th + theta_integral(x)) / (2.0 * kPi);
    }

    double half_mass() const { return (xm_ * edge_ + prefix_[kPanels]) / (2.0 * kPi); }

    // Mass over (-pi, theta].
    double cdf(double theta) const {
        const double a = principal_angle(theta);
        const double m = std::abs(a) >= edge_ ? 0.0 : mass_above(boundary_x_of_theta(std::abs(a), t_));
        return a >= 0.0 ? 1.0 - m : m;
    }

    // Positive-side quantile: theta with mass `target` above it, target in (0, 1/2].
    double upper_quantile(double target) const {
        double lo = xm_, hi = xp_;
        for (int i = 0; i < 110 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (mass_above(mid) < target ? lo : hi) = mid;
        }
        return boundary_theta(0.5 * (lo + hi), t_);
    }

private:
    static constexpr std::size_t kPanels = 64;

    double x_of_v(double v) const { return xm_ + (xp_ - xm_) * 0.5 * (1.0 - std::cos(kPi * v)); }
    double v_of_x(double x) const {
        const double c = std::clamp(1.0 - 2.0 * (x - xm_) / (xp_ - xm_), -1.0, 1.0);
        return std::acos(c) / kPi;
    }
    double integrand(double v) const {
        const double jac = (xp_ - xm_) * 0.5 * kPi * std::sin(kPi * v);
        return boundary_theta(x_of_v(v), t_) * jac;
    }

    double t_;
    double xm_, xp_, edge_;
    std::vector<double> prefix_;
};

} // namespace

double cdf(double theta, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("cdf: t must be > 0");
    return MassProfile(t).cdf(theta);
}

// ---------------------------------------------------------------------------
// Limiting transform

LimitTransform::LimitTransform(double t, double tolerance, int step_budget)
    : t_(t), tol_(tolerance), budget_(step_budget) {
    if (!(t >= 0.0)) throw std::invalid_argument("LimitTransform: t must be >= 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("LimitTransform: tolerance must be > 0");
}

std::complex<double> limiting_transform(const PolarPoint& z, double t) {
    return LimitTransform(t)(z);
}

namespace {

// Damped Newton on F(w) - z with the iterate kept in the closed right
// half-plane. Returns true on residual convergence.
bool newton_refine(std::complex<double>& w, std::complex<double> z, double t, double tol,
                   double& last_res) {
    std::complex<double> res = implicit_F(w, t) - z;
    double rn = std::abs(res);
    const double target = tol * (1.0 + std::abs(z));
    for (int it = 0; it < 100; ++it) {
        if (rn <= target) {
            last_res = rn;
            return true;
        }
        const std::complex<double> d = implicit_F_prime(w, t);
        if (!(std::abs(d) > 0.0) || !std::isfinite(std::abs(d))) break;
        std::complex<double> dw = -res / d;
        double alpha = 1.0;
        if (w.real() + dw.real() < 0.0 && dw.real() < 0.0) {
            // clip the step at the imaginary axis (branch constraint Re w >= 0)
            alpha = std::min(1.0, 0.95 * w.real() / -dw.real());
            if (!(alpha > 0.0)) alpha = 0.5;  // already on the axis; shrink instead
        }
        bool improved = false;
        for (int bt = 0; bt < 45; ++bt) {
            std::complex<double> wn = w + alpha * dw;
            if (wn.real() < 0.0) wn = {0.0, wn.imag()};
            const std::complex<double> rn2 = implicit_F(wn, t) - z;
            if (std::abs(rn2) < rn * (1.0 - 0.25 * alpha)) {
                w = wn;
                res = rn2;
                rn = std::abs(rn2);
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }
    last_res = rn;
    return rn <= target;
}

} // namespace

std::complex<double> LimitTransform::solve_inside(std::complex<double> z) const {
    if (z == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};
    std::complex<double> w = (1.0 + z) / (1.0 - z);
    if (t_ == 0.0) return w;

    double res = 0.0;
    if (has_seed_ && std::abs(z - seed_z_) < 0.05) {
        std::complex<double> w_try = seed_w_;
        if (newton_refine(w_try, z, t_, tol_, res) && w_try.real() > -1e-13) {
            seed_z_ = z;
            seed_w_ = w_try;
            return w_try;
        }
    }

    double tau = 0.0;
    double h = std::min(t_, 0.1);
    int steps = 0;
    while (tau < t_) {
        if (++steps > budget_)
            throw SolverError("limiting transform: homotopy budget exhausted", res);
        const double tau_next = std::min(t_, tau + h);
        std::complex<double> w_try = w;
        if (newton_refine(w_try, z, tau_next, tol_, res)) {
            w = w_try;
            tau = tau_next;
            h = std::min(h * 1.7, t_);
        } else {
            h *= 0.5;
            if (h < 1e-9 * std::max(t_, 1.0))
                throw SolverError("limiting transform: homotopy step underflow", res);
        }
    }
    if (std::abs(implicit_F(w, t_) - z) > tol_ * (1.0 + std::abs(z)))
        throw SolverError("limiting transform: unverified root", std::abs(implicit_F(w, t_) - z));
    has_seed_ = true;
    seed_z_ = z;
    seed_w_ = w;
    return w;
}

std::complex<double> LimitTransform::boundary_value(double theta) const {
    const double a = std::abs(theta);
    if (t_ == 0.0) {
        if (a == 0.0) throw std::domain_error("limiting transform: z = 1 at t = 0");
        const double y = 1.0 / std::tan(0.5 * a);  // (1+z)/(1-z) on the circle
        return theta >= 0.0 ? std::complex<double>(0.0, y) : std::complex<double>(0.0, -y);
    }
    if (!(t_ < 4.0) || a < theta_edge(t_))
        throw std::domain_error("limiting transform: on-circle query inside the support closure");
    const double k0 = std::sqrt(4.0 / t_ - 1.0);
    // Gap arc maps to the imaginary segment: F(iy) = e^{i phi(y)} with
    // phi(y) = atan2(2y, y^2 - 1) + t y / 2 decreasing from pi to Theta_t.
    auto phi = [&](double y) { return std::atan2(2.0 * y, y * y - 1.0) + 0.5 * t_ * y; };
    double lo = 0.0, hi = k0;
    for (int i = 0; i < 110 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (phi(mid) > a ? lo : hi) = mid;
    }
    const double y = 0.5 * (lo + hi);
    return theta >= 0.0 ? std::complex<double>(0.0, y) : std::complex<double>(0.0, -y);
}

std::complex<double> LimitTransform::operator()(const PolarPoint& z) const {
    if (std::abs(z.r - 1.0) < 1e-14) return boundary_value(z.theta);
    if (z.r < 1.0) return solve_inside(z.to_complex());
    // reflection f~(r e^{i th}) = -conj(f~(r^{-1} e^{i th}))
    return -std::conj(solve_inside(std::polar(1.0 / z.r, z.theta)));
}

std::complex<double> LimitTransform::operator()(std::complex<double> z) const {
    return operator()(PolarPoint::from_complex(z));
}

// ---------------------------------------------------------------------------
// Density curve, quantiles, shape functions

double DensityCurve::trapezoid_mass() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < theta.size(); ++i)
        acc += 0.5 * (theta[i] - theta[i - 1]) * (rho[i] + rho[i - 1]);
    return acc;
}

DensityCurve density_curve(double t, std::size_t n) {
    if (!(t > 0.0)) throw std::invalid_argument("density_curve: t must be > 0");
    if (n < 16) throw std::invalid_argument("density_curve: n >= 16 required");
    DensityCurve curve;
    curve.t = t;
    curve.edge = t < 4.0 ? theta_edge(t) : kPi;
    curve.gap = t < 4.0 ? gap(t) : 0.0;

    const double xm = x_minus(t), xp = x_plus(t);
    std::vector<double> th(n), rho(n), src(n);
    for (std::size_t j = 0; j < n; ++j) {
        // cosine clustering resolves the square-root vanishing at both ends
        const double u = static_cast<double>(j) / static_cast<double>(n - 1);
        const double x = xm + (xp - xm) * 0.5 * (1.0 - std::cos(kPi * u));
        th[j] = boundary_theta(x, t);
        rho[j] = x / (2.0 * kPi);
        src[j] = x;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // th[] descends from the edge angle to 0 as x sweeps up; the mirrored
    // branch therefore comes out ascending from -edge
    for (std::size_t j = 0; j < n; ++j) {
        if (th[j] > 0.0) {
            curve.theta.push_back(-th[j]);
            curve.rho.push_back(rho[j]);
            curve.source_x.push_back(src[j]);
        }
    }
    if (t < 4.0) {
        curve.theta.insert(curve.theta.begin(), -kPi);
        curve.rho.insert(curve.rho.begin(), 0.0);
        curve.source_x.insert(curve.source_x.begin(), nan);
    }
    for (std::size_t j = 0; j < n; ++j) {
        curve.theta.push_back(th[n - 1 - j]);
        curve.rho.push_back(rho[n - 1 - j]);
        curve.source_x.push_back(src[n - 1 - j]);
    }
    if (t < 4.0) {
        curve.theta.push_back(kPi);
        curve.rho.push_back(0.0);
        curve.source_x.push_back(nan);
    }
    return curve;
}

QuantileTable::QuantileTable(double t, std::size_t n, std::vector<double> gamma)
    : t_(t), n_(n), gamma_(std::move(gamma)) {
    if (gamma_.size() != n_ || n_ == 0)
        throw std::invalid_argument("QuantileTable: size mismatch");
}

double QuantileTable::gamma(std::ptrdiff_t i) const {
    const double two_pi = 2.0 * kPi;
    double shift = 0.0;
    while (i > static_cast<std::ptrdiff_t>(n_)) {
        i -= static_cast<std::ptrdiff_t>(n_);
        shift += two_pi;
    }
    while (i < 1) {
        i += static_cast<std::ptrdiff_t>(n_);
        shift -= two_pi;
    }
    return gamma_[static_cast<std::size_t>(i - 1)] + shift;
}

QuantileTable quantiles(double t, std::size_t n) {
    if (!(t > 0.0)) throw std::invalid_argument("quantiles: t must be > 0");
    if (n == 0) throw std::invalid_argument("quantiles: N >= 1 required");
    MassProfile profile(t);
    if (std::abs(profile.half_mass() - 0.5) > 1e-9)
        throw QuadratureError("quantiles: CDF normalization drifted",
                              std::abs(profile.half_mass() - 0.5));
    std::vector<double> gamma(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double q = static_cast<double>(i) / static_cast<double>(n);
        if (i == n) {
            gamma[i - 1] = profile.edge();
        } else if (2 * i == n) {
            gamma[i - 1] = 0.0;
        } else if (q > 0.5) {
            gamma[i - 1] = profile.upper_quantile(1.0 - q);
        } else {
            gamma[i - 1] = -profile.upper_quantile(q);
        }
    }
    for (std::size_t i = 1; i < n; ++i)
        if (gamma[i] < gamma[i - 1])
            throw QuadratureError("quantiles: non-monotone table", gamma[i - 1] - gamma[i]);
    return QuantileTable(t, n, std::move(gamma));
}

double shape_psi_e(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("shape_psi_e: lambda >= 0 required");
    const double root = std::sqrt(lambda * (1.0 + lambda));
    const double p = 1.0 + 2.0 * lambda + 2.0 * root;
    // (1 + 2l - 2 sqrt(l(1+l))) = 1/p exactly; avoids cancellation for large l
    const double p23 = std::cbrt(p * p);
    return root / (p23 + 1.0 / p23 + 1.0);
}

double shape_psi_m(double lambda) {
    const double hyp = std::hypot(1.0, lambda);
    const double q = hyp + std::abs(lambda);  // psi_m is even; q >= 1
    const double q23 = std::cbrt(q * q);
    return hyp / (q23 + 1.0 / q23 - 1.0) - 1.0;
}

EdgeShapePrediction edge_shape_check(double t, double E) {
    if (!(t > 3.5 && t < 4.0)) throw std::invalid_argument("edge_shape_check: need 3.5 < t < 4");
    if (!(E > 0.0 && E <= 0.1)) throw std::invalid_argument("edge_shape_check: need 0 < E <= 0.1");
    const double s = 4.0 - t;
    const double delta = gap(t);
    EdgeShapePrediction out;
    out.numeric = density(theta_edge(t) - E, t);
    // prefactor sqrt(Delta) 3 sqrt(2) / (pi t^{3/4} s^{1/4}); this is the form
    // whose small and large argument limits reproduce the square-root edge and
    // exact-cusp constants
    out.predicted = std::sqrt(delta) * 3.0 * std::sqrt(2.0) /
                    (kPi * std::pow(t, 0.75) * std::pow(s, 0.25)) * shape_psi_e(E / delta);
    return out;
}

} // namespace ubmlab::biane
