#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ubmlab/biane.hpp"
#include "ubmlab/errors.hpp"
#include "ubmlab/polar.hpp"
#include "ubmlab/quadrature.hpp"

using namespace ubmlab;
namespace b = ubmlab::biane;
using std::numbers::pi;

TEST_CASE("edge angle closed form") {
    CHECK(b::theta_edge(4.0) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(b::theta_edge(0.0) == 0.0);
    CHECK(b::theta_edge(2.0) == doctest::Approx(1.0 + pi / 2.0).epsilon(1e-15));
    CHECK(b::theta_edge(1e-4) == doctest::Approx(2.0 * std::sqrt(1e-4)).epsilon(0.01));
    CHECK_THROWS_AS(b::theta_edge(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(b::theta_edge(4.1), std::invalid_argument);
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
        const double v = b::theta_edge(4.0 * k / 100.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("gap closed form and cube-root-in-s asymptotics") {
    CHECK(b::gap(4.0) == doctest::Approx(0.0));
    CHECK(b::gap(0.0) == doctest::Approx(2.0 * pi));
    CHECK(b::gap(3.99) == doctest::Approx(std::pow(0.01, 1.5) / 3.0).epsilon(0.05));
    double prev = 1e9;
    for (int k = 1; k < 100; ++k) {
        const double v = b::gap(4.0 * k / 100.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("support interval endpoints x_plus / x_minus") {
    CHECK(b::x_minus(1.0) == 0.0);
    CHECK(b::x_minus(4.0) == 0.0);
    CHECK(b::x_minus(4.01) == doctest::Approx(std::sqrt(3.0) / 2.0 * 0.1).epsilon(0.1));
    CHECK(b::boundary_k(b::x_plus(2.0), 2.0) < 1e-7);
    // x_plus and x_minus really bracket the positive part of k_t^2
    for (double t : {0.5, 2.0, 4.0, 4.7}) {
        const double xm = b::x_minus(t), xp = b::x_plus(t);
        CHECK(xp > 1.0);
        const double mid = 0.5 * (xm + xp);
        CHECK(b::boundary_k(mid, t) > 0.0);
        CHECK_THROWS_AS(b::boundary_k(xp * 1.01, t), std::invalid_argument);
    }
    CHECK_THROWS_AS(b::boundary_k(b::x_minus(4.5) / 2.0, 4.5), std::invalid_argument);
}

TEST_CASE("boundary height k_t") {
    // L'Hopital limit of the 0/0 form at x -> 0
    CHECK(b::boundary_k(0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b::boundary_k(1e-14, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b::boundary_k(0.0, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    SUBCASE("against extended-precision evaluation at x = 0.5, t = 2") {
        const long double x = 0.5L, t = 2.0L;
        const long double num = (x + 1.0L) * (x + 1.0L) -
                                (x - 1.0L) * (x - 1.0L) * std::exp(t * x);
        const long double k_ref = std::sqrt(num / (std::exp(t * x) - 1.0L));
        CHECK(b::boundary_k(0.5, 2.0) ==
              doctest::Approx(static_cast<double>(k_ref)).epsilon(1e-14));
    }
}

TEST_CASE("boundary parametrization maps onto the unit circle") {
    for (double t : {0.5, 2.0, 3.9, 4.0, 4.5}) {
        const double xm = b::x_minus(t), xp = b::x_plus(t);
        double prev_theta = 1e9;
        for (int k = 0; k <= 40; ++k) {
            const double x = xm + (xp - xm) * k / 40.0;
            const double kk = b::boundary_k(x, t);
            const std::complex<double> w(x, kk);
            CHECK(std::abs(std::abs(b::implicit_F(w, t)) - 1.0) < 1e-12);
            const double th = b::boundary_theta(x, t);
            CHECK(th <= prev_theta + 1e-14);  // strictly decreasing in x
            prev_theta = th;
        }
    }
}

TEST_CASE("limiting transform basic values") {
    SUBCASE("t = 0 is the explicit free resolvent") {
        CHECK(std::abs(b::limiting_transform(PolarPoint(2.0, 0.0), 0.0) -
                       std::complex<double>(-3.0, 0.0)) < 1e-15);
    }
    SUBCASE("z near the origin gives 1 (total mass)") {
        for (double t : {0.3, 1.0, 4.2}) {
            const auto f = b::limiting_transform(PolarPoint(1e-300, 0.7), t);
            CHECK(std::abs(f - std::complex<double>(1.0, 0.0)) < 1e-12);
        }
    }
    SUBCASE("edge boundary value i sqrt(4/t - 1)") {
        const auto f = b::limiting_transform(PolarPoint(1.0, b::theta_edge(2.0)), 2.0);
        CHECK(std::abs(f - std::complex<double>(0.0, 1.0)) < 1e-6);
        const auto g = b::limiting_transform(PolarPoint(1.0, -b::theta_edge(2.0)), 2.0);
        CHECK(std::abs(g - std::complex<double>(0.0, -1.0)) < 1e-6);
    }
    SUBCASE("on-support on-circle queries are rejected") {
        CHECK_THROWS_AS(b::limiting_transform(PolarPoint(1.0, 0.5), 2.0), std::domain_error);
        CHECK_THROWS_AS(b::limiting_transform(PolarPoint(1.0, 3.0), 4.5), std::domain_error);
    }
}

TEST_CASE("limiting transform root residual and branch signs") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ur(0.05, 0.95), uth(-pi, pi), ut(0.05, 5.0);
    for (int rep = 0; rep < 60; ++rep) {
        const double t = ut(rng);
        b::LimitTransform lt(t);
        const PolarPoint inside(ur(rng), uth(rng));
        const auto w = lt(inside);
        CHECK(std::abs(b::implicit_F(w, t) - inside.to_complex()) <=
              1e-13 * (1.0 + std::abs(inside.to_complex())));
        CHECK(w.real() >= 0.0);
        const PolarPoint outside(1.0 / inside.r, inside.theta);
        const auto wo = lt(outside);
        CHECK(wo.real() <= 0.0);
        // reflection identity between the two sides
        CHECK(std::abs(wo + std::conj(w)) < 1e-11);
    }
}

TEST_CASE("a-priori bound |f~| <= 3 (1 + 1/sqrt(t)) inside the disc") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> ur(0.01, 0.999), uth(-pi, pi);
    for (double t : {0.05, 0.5, 1.0, 2.0, 4.0, 6.0}) {
        b::LimitTransform lt(t);
        for (int rep = 0; rep < 20; ++rep) {
            const auto w = lt(PolarPoint(ur(rng), uth(rng)));
            CHECK(std::abs(w) <= 3.0 * (1.0 + 1.0 / std::sqrt(t)));
        }
    }
}

TEST_CASE("limiting transform against quadrature of the Poisson integral") {
    // independent oracle: integrate the kernel against the boundary density
    const double t = 1.0;
    const std::complex<double> z(0.5, 0.0);
    const double edge = b::theta_edge(t);
    const std::size_t n = 1000000;
    std::complex<double> acc{0.0, 0.0};
    double prev_theta = -edge, prev_rho = 0.0;
    std::complex<double> prev_term{0.0, 0.0};
    bool first = true;
    for (std::size_t k = 0; k <= n; ++k) {
        const double theta = -edge + 2.0 * edge * static_cast<double>(k) / static_cast<double>(n);
        const double rho = b::density(theta, t);
        const auto lam = std::polar(1.0, theta);
        const auto term = (lam + z) / (lam - z) * rho;
        if (!first) acc += 0.5 * (theta - prev_theta) * (term + prev_term);
        prev_theta = theta;
        prev_rho = rho;
        prev_term = term;
        first = false;
    }
    (void)prev_rho;
    const auto w = b::limiting_transform(PolarPoint(0.5, 0.0), t);
    CHECK(std::abs(w - acc) < 1e-6);
}

TEST_CASE("solver failure carries the residual and is explicit") {
    b::LimitTransform tight(3.0, 1e-13, /*step_budget=*/1);
    CHECK_THROWS_AS(tight(PolarPoint(0.9, 0.4)), SolverError);
}

TEST_CASE("density values") {
    CHECK(b::density(b::theta_edge(2.0) + 0.1, 2.0) == 0.0);
    CHECK(b::density(-b::theta_edge(2.0) - 0.1, 2.0) == 0.0);
    CHECK(b::density(pi, 4.0) == 0.0);
    SUBCASE("square-root edge constant at t = 2") {
        const double E = 1e-6;
        const double slope = b::density(b::theta_edge(2.0) - E, 2.0) / std::sqrt(E);
        CHECK(slope == doctest::Approx(1.0 / (pi * std::sqrt(2.0))).epsilon(0.02));
    }
    SUBCASE("exact cusp constant at t = 4") {
        const double E = 1e-6;
        const double slope = b::density(pi - E, 4.0) / std::cbrt(E);
        CHECK(slope == doctest::Approx(std::cbrt(1.5) * std::sqrt(3.0) / (4.0 * pi)).epsilon(0.03));
    }
    SUBCASE("post-merge minimum at theta = pi") {
        const double s = 0.01;
        const double ratio =
            b::density(pi, 4.0 + s) * 4.0 * pi / (std::sqrt(3.0) * std::sqrt(s));
        CHECK(ratio == doctest::Approx(1.0).epsilon(0.15));
    }
    SUBCASE("short-time square-root shape at t = 0.01") {
        const double t = 0.01, s = 4.0 - t;
        for (double frac : {0.25, 0.5, 1.0}) {
            const double E = frac * 1e-3 * std::sqrt(t);
            const double pred = std::sqrt(2.0) / (pi * std::pow(s, 0.25) * std::sqrt(t)) *
                                std::sqrt(E / std::sqrt(t));
            CHECK(b::density(b::theta_edge(t) - E, t) == doctest::Approx(pred).epsilon(0.01));
        }
    }
}

TEST_CASE("density curve structure and mass") {
    for (double t : {0.25, 1.0, 3.9, 4.0, 4.5}) {
        const auto curve = b::density_curve(t, 1024);
        CHECK(curve.trapezoid_mass() == doctest::Approx(1.0).epsilon(1e-6));
        for (std::size_t i = 0; i < curve.theta.size(); ++i) {
            CHECK(curve.rho[i] >= 0.0);
            if (i) CHECK(curve.theta[i] >= curve.theta[i - 1]);
            if (t < 4.0 && std::abs(curve.theta[i]) > curve.edge + 1e-12)
                CHECK(curve.rho[i] == 0.0);
        }
        // sampled symmetry: interpolate rho at -theta and compare
        for (std::size_t i = 0; i < curve.theta.size(); i += 37) {
            const double th = curve.theta[i];
            CHECK(b::density(th, t) == doctest::Approx(b::density(-th, t)).epsilon(1e-10));
        }
    }
    SUBCASE("edge limit point present for t < 4") {
        const auto curve = b::density_curve(2.0, 64);
        bool found = false;
        for (std::size_t i = 0; i < curve.theta.size(); ++i)
            if (curve.theta[i] == doctest::Approx(curve.edge).epsilon(1e-14) && curve.rho[i] == 0.0)
                found = true;
        CHECK(found);
    }
    CHECK_THROWS_AS(b::density_curve(2.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(b::density_curve(0.0, 64), std::invalid_argument);
}

TEST_CASE("edge slope recoverable from the sampled curve") {
    const auto curve = b::density_curve(2.0, 4096);
    const double target = curve.edge - 1e-6;
    // linear interpolation of the clustered samples around Theta - 1e-6
    double slope = 0.0;
    for (std::size_t i = 1; i < curve.theta.size(); ++i) {
        if (curve.theta[i - 1] <= target && target < curve.theta[i]) {
            const double w =
                (target - curve.theta[i - 1]) / (curve.theta[i] - curve.theta[i - 1]);
            slope = ((1.0 - w) * curve.rho[i - 1] + w * curve.rho[i]) / std::sqrt(1e-6);
        }
    }
    CHECK(slope == doctest::Approx(1.0 / (pi * std::sqrt(2.0))).epsilon(0.02));
}

TEST_CASE("quantiles solve the CDF and honor the conventions") {
    SUBCASE("center and edge pinning") {
        const auto table = b::quantiles(1.0, 10);
        CHECK(table.gamma(5) == 0.0);
        CHECK(table.gamma(10) == doctest::Approx(b::theta_edge(1.0)));
        CHECK(table.gamma(12) == doctest::Approx(2.0 * pi + table.gamma(2)));
        CHECK(table.gamma(-1) == doctest::Approx(table.gamma(9) - 2.0 * pi));
        const auto t45 = b::quantiles(4.5, 8);
        CHECK(t45.gamma(8) == doctest::Approx(pi));
    }
    SUBCASE("nondecreasing") {
        const auto table = b::quantiles(2.5, 64);
        for (std::size_t i = 2; i <= 64; ++i)
            CHECK(table.gamma(static_cast<std::ptrdiff_t>(i)) >=
                  table.gamma(static_cast<std::ptrdiff_t>(i - 1)));
    }
    SUBCASE("independent trapezoid CDF re-verification at t = 1, N = 100") {
        const auto table = b::quantiles(1.0, 100);
        const double edge = b::theta_edge(1.0);
        // fine-grid trapezoid CDF accumulated between consecutive quantiles
        double cum = 0.0;
        double lo = -edge;
        for (std::size_t i = 1; i < 100; ++i) {
            const double hi = table.gamma(static_cast<std::ptrdiff_t>(i));
            const std::size_t steps = 4000;
            double panel = 0.0;
            for (std::size_t k = 0; k < steps; ++k) {
                const double a = lo + (hi - lo) * static_cast<double>(k) / steps;
                const double bx = lo + (hi - lo) * static_cast<double>(k + 1) / steps;
                panel += 0.5 * (bx - a) * (b::density(a, 1.0) + b::density(bx, 1.0));
            }
            cum += panel;
            CHECK(std::abs(cum - static_cast<double>(i) / 100.0) < 1e-6);
            lo = hi;
        }
        // the cdf() route is sharper than the trapezoid oracle; check 1e-8 there
        for (std::size_t i = 5; i < 100; i += 13)
            CHECK(std::abs(b::cdf(table.gamma(static_cast<std::ptrdiff_t>(i)), 1.0) -
                           static_cast<double>(i) / 100.0) < 1e-8);
    }
}

TEST_CASE("shape functions") {
    CHECK(b::shape_psi_e(0.0) == 0.0);
    CHECK(b::shape_psi_m(0.0) == 0.0);
    CHECK(b::shape_psi_e(1e-8) / std::sqrt(1e-8) == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
    CHECK(b::shape_psi_e(1e8) / std::cbrt(1e8) ==
          doctest::Approx(std::pow(4.0, -2.0 / 3.0)).epsilon(1e-3));
    CHECK(b::shape_psi_m(3.0) == doctest::Approx(b::shape_psi_m(-3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(b::shape_psi_e(-0.5), std::invalid_argument);
}

TEST_CASE("edge shape check near the cusp era") {
    const double t = 3.9;
    const double delta = b::gap(t);
    SUBCASE("at half a gap") {
        const auto r = b::edge_shape_check(t, delta / 2.0);
        CHECK(r.numeric == doctest::Approx(r.predicted).epsilon(0.10));
    }
    SUBCASE("deep square-root regime") {
        const auto r = b::edge_shape_check(t, delta * 1e-3);
        CHECK(r.numeric / r.predicted == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("cube-root window bracketed by the cusp constant") {
        const double c4 = std::cbrt(1.5) * std::sqrt(3.0) / (4.0 * pi);
        for (double E : {0.01, 0.03, 0.05}) {
            const double rho = b::density(b::theta_edge(t) - E, t);
            CHECK(rho >= c4 * std::cbrt(E) / 3.0);
            CHECK(rho <= 3.0 * c4 * std::cbrt(E));
        }
    }
    CHECK_THROWS_AS(b::edge_shape_check(3.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(b::edge_shape_check(3.9, 0.2), std::invalid_argument);
}

TEST_CASE("monotone edge and interior floor") {
    SUBCASE("interior density stays above the regression floor for t >= 4.5") {
        for (double t : {4.5, 5.0, 8.0}) {
            double lo = 1e9;
            for (int k = 0; k <= 64; ++k) lo = std::min(lo, b::density(-pi + 2 * pi * k / 64.0, t));
            CHECK(lo > 0.01);
        }
    }
    SUBCASE("cross-check cdf totals") {
        for (double t : {0.3, 1.7, 4.0, 4.4}) {
            CHECK(b::cdf(pi, t) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(b::cdf(0.0, t) == doctest::Approx(0.5).epsilon(1e-10));
        }
    }
}
