#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ubmlab/biane.hpp"
#include "ubmlab/parallel.hpp"
#include "ubmlab/rng.hpp"
#include "ubmlab/sim.hpp"
#include "ubmlab/stats.hpp"

using namespace ubmlab;
using std::numbers::pi;

TEST_CASE("hermitian increment is exactly hermitian with the right moments") {
    auto rng = trial_stream(1, 0);
    const auto dw = sim::hermitian_bm_increment(8, 1e-2, rng);
    CHECK((dw - dw.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    SUBCASE("N = 1 reduces to a real gaussian of variance dt") {
        auto r2 = trial_stream(2, 0);
        const double dt = 0.37;
        std::vector<double> xs(100000);
        for (auto& x : xs) {
            const auto w = sim::hermitian_bm_increment(1, dt, r2);
            CHECK(w(0, 0).imag() == 0.0);
            x = w(0, 0).real();
        }
        const double m = mean(xs);
        double var = 0.0;
        for (double x : xs) var += (x - m) * (x - m);
        var /= static_cast<double>(xs.size() - 1);
        // sample variance of a gaussian: sd ~ var * sqrt(2/n)
        CHECK(std::abs(var - dt) < 3.0 * dt * std::sqrt(2.0 / xs.size()));
        CHECK(std::abs(m) < 3.0 * std::sqrt(dt / xs.size()));
    }

    SUBCASE("entry second moments are dt/N") {
        auto r3 = trial_stream(3, 0);
        const double dt = 0.11;
        const std::size_t n = 4, reps = 100000;
        double off = 0.0, diag = 0.0;
        for (std::size_t k = 0; k < reps; ++k) {
            const auto w = sim::hermitian_bm_increment(n, dt, r3);
            off += std::norm(w(0, 2));
            diag += std::norm(w(1, 1));
        }
        off /= reps;
        diag /= reps;
        const double want = dt / static_cast<double>(n);
        CHECK(std::abs(off - want) < 3.0 * want * std::sqrt(2.0 / reps));
        CHECK(std::abs(diag - want) < 3.0 * want * std::sqrt(2.0 / reps));
    }
}

TEST_CASE("unitary step basics") {
    const sim::Matrix zero = sim::Matrix::Zero(6, 6);
    auto rng = trial_stream(4, 0);
    sim::Matrix u = sim::Matrix::Identity(6, 6);
    for (int k = 0; k < 10; ++k) u = sim::step_unitary(u, sim::hermitian_bm_increment(6, 1e-2, rng));
    SUBCASE("zero increment leaves the state untouched") {
        const sim::Matrix same = sim::step_unitary(u, zero);
        CHECK((same - u).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("steps preserve unitarity to roundoff") {
        CHECK(sim::unitarity_defect(u) < 1e-12);
    }
    SUBCASE("matrix exponential agrees with the eigensolver route") {
        const auto h = sim::hermitian_bm_increment(6, 0.3, rng);
        Eigen::SelfAdjointEigenSolver<sim::Matrix> es(h);
        sim::Matrix ref = sim::Matrix::Zero(6, 6);
        for (int i = 0; i < 6; ++i)
            ref += std::exp(std::complex<double>(0.0, es.eigenvalues()[i])) *
                   es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        CHECK((sim::exp_i_hermitian(h) - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("scalar mode: phases accumulate a brownian motion") {
    const double t = 0.7;
    std::vector<double> phases(400);
    parallel_trials(phases.size(), 2, [&](std::size_t k) {
        sim::SimConfig cfg;
        cfg.n = 1;
        cfg.t_final = t;
        cfg.dt = 1e-3;
        cfg.seed = 900;
        cfg.trial = k;
        const auto traj = sim::simulate(cfg);
        phases[k] = traj.final_snapshot().angle(0);
    });
    const double p = ks_test_one_sample(
        phases, [&](double x) { return normal_cdf(x / std::sqrt(t)); });
    CHECK(p > 0.01);
}

TEST_CASE("simulate at t = 0 returns the coinciding start") {
    for (auto mode : {sim::Mode::matrix, sim::Mode::particles}) {
        sim::SimConfig cfg;
        cfg.n = 5;
        cfg.t_final = 0.0;
        cfg.dt = 1e-3;
        cfg.mode = mode;
        const auto traj = sim::simulate(cfg);
        REQUIRE(traj.snapshots.size() == 1);
        for (double a : traj.final_snapshot().angles()) CHECK(a == 0.0);
    }
}

TEST_CASE("config validation") {
    sim::SimConfig cfg;
    cfg.mode = sim::Mode::particles;
    cfg.beta = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.beta = 1.0;
    CHECK_NOTHROW(cfg.validate());
    cfg.mode = sim::Mode::matrix;
    cfg.beta = 3.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.beta = 2.0;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("determinism: identical seed and config give identical trajectories") {
    sim::SimConfig cfg;
    cfg.n = 12;
    cfg.t_final = 0.4;
    cfg.dt = 1e-3;
    cfg.seed = 31;
    cfg.mode = sim::Mode::matrix;
    const auto a = sim::simulate(cfg);
    const auto b = sim::simulate(cfg);
    REQUIRE(a.final_snapshot().size() == b.final_snapshot().size());
    for (std::size_t i = 0; i < a.final_snapshot().size(); ++i)
        CHECK(a.final_snapshot().angle(i) == b.final_snapshot().angle(i));
    cfg.trial = 1;
    const auto c = sim::simulate(cfg);
    CHECK(c.final_snapshot().angle(0) != a.final_snapshot().angle(0));
    cfg.mode = sim::Mode::particles;
    cfg.trial = 0;
    const auto p1 = sim::simulate(cfg);
    const auto p2 = sim::simulate(cfg);
    for (std::size_t i = 0; i < p1.final_snapshot().size(); ++i)
        CHECK(p1.final_snapshot().angle(i) == p2.final_snapshot().angle(i));
}

TEST_CASE("particle ordering and winding window hold at snapshots") {
    sim::SimConfig cfg;
    cfg.n = 48;
    cfg.t_final = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 77;
    cfg.mode = sim::Mode::particles;
    cfg.beta = 1.0;  // beta = 1 is the roughest allowed dynamics
    cfg.snapshot_times = {0.25, 0.5, 0.75};
    const auto traj = sim::simulate(cfg);
    REQUIRE(traj.snapshots.size() == 4);
    for (const auto& snap : traj.snapshots) {
        const auto& a = snap.angles();
        for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
        CHECK(a.back() - a.front() < 2.0 * pi);
    }
}

TEST_CASE("unitarity defect stays below 1e-10 across snapshots") {
    sim::SimConfig cfg;
    cfg.n = 24;
    cfg.t_final = 1.5;
    cfg.dt = 1e-3;
    cfg.seed = 5;
    cfg.mode = sim::Mode::matrix;
    cfg.snapshot_times = {0.5, 1.0};
    const auto traj = sim::simulate(cfg);
    CHECK(traj.max_unitarity_defect <= 1e-10);
}

TEST_CASE("center of mass equals the accumulated trace exactly") {
    sim::SimConfig cfg;
    cfg.n = 32;
    cfg.t_final = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 123;
    cfg.mode = sim::Mode::matrix;
    for (int k = 1; k <= 10; ++k) cfg.snapshot_times.push_back(0.1 * k);
    const auto traj = sim::simulate(cfg);
    REQUIRE(traj.snapshots.size() == traj.com_trace.size());
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
        CHECK(std::abs(traj.snapshots[k].mean_angle() - traj.com_trace[k]) <= 1e-3);
}

TEST_CASE("trace decay toward exp(-t/2)") {
    const std::size_t trials = 300;
    const std::size_t n = 16;
    std::vector<double> traces(trials);
    parallel_trials(trials, 2, [&](std::size_t k) {
        sim::SimConfig cfg;
        cfg.n = n;
        cfg.t_final = 1.0;
        cfg.dt = 1e-3;
        cfg.seed = 1000;
        cfg.trial = k;
        cfg.mode = sim::Mode::matrix;
        cfg.track_winding = false;
        const auto traj = sim::simulate(cfg);
        double tr = 0.0;
        for (double a : traj.final_snapshot().angles()) tr += std::cos(a);
        traces[k] = tr / static_cast<double>(n);
    });
    const double m = mean(traces);
    const double se = sample_stddev(traces) / std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(m - std::exp(-0.5)) < 3.0 * se);
}

TEST_CASE("weak order: semigroup scalar halves its defect with dt") {
    // E[tr U_t]/N factorizes exactly into per-step scalars phi(dt) =
    // E[tr exp(i dW)]/N because increments are independent and isotropic, so
    // the terminal weak error can be measured through phi with the gaussian
    // part subtracted as a control variate.
    const std::size_t n = 8;
    const double t = 1.0;
    auto phi_hat = [&](double dt, std::size_t reps, std::uint64_t seed) {
        auto rng = trial_stream(seed, 0);
        double acc = 0.0;
        for (std::size_t k = 0; k < reps; ++k) {
            const auto dw = sim::hermitian_bm_increment(n, dt, rng);
            const auto e = sim::exp_i_hermitian(dw);
            // subtract I + i dW - dW^2/2 whose expected trace is exactly
            // N (1 - dt/2); what remains has O(dt^{3/2}) fluctuations
            const std::complex<double> im(0.0, 1.0);
            const sim::Matrix rest = e - sim::Matrix::Identity(n, n) - im * dw + 0.5 * (dw * dw);
            acc += rest.trace().real();
        }
        return 1.0 - dt / 2.0 + acc / (static_cast<double>(reps) * static_cast<double>(n));
    };
    const double dt8 = std::pow(2.0, -8.0), dt9 = std::pow(2.0, -9.0), dt10 = std::pow(2.0, -10.0);
    const double e8 = std::abs(std::pow(phi_hat(dt8, 300000, 71), t / dt8) - std::exp(-0.5));
    const double e9 = std::abs(std::pow(phi_hat(dt9, 300000, 72), t / dt9) - std::exp(-0.5));
    const double e10 = std::abs(std::pow(phi_hat(dt10, 300000, 73), t / dt10) - std::exp(-0.5));
    CHECK(e8 / e9 == doctest::Approx(2.0).epsilon(0.45));
    CHECK(e9 / e10 == doctest::Approx(2.0).epsilon(0.45));
}

TEST_CASE("matrix and particle dynamics agree in law at beta = 2") {
    const std::size_t trials = 200, n = 16;
    std::vector<double> mx(trials), pt(trials);
    parallel_trials(trials, 2, [&](std::size_t k) {
        sim::SimConfig cfg;
        cfg.n = n;
        cfg.t_final = 1.0;
        cfg.dt = 1e-3;
        cfg.seed = 2000;
        cfg.trial = k;
        cfg.mode = sim::Mode::matrix;
        const auto a = sim::simulate(cfg);
        mx[k] = a.final_snapshot().principal().back();
        cfg.mode = sim::Mode::particles;
        cfg.seed = 2001;
        const auto b = sim::simulate(cfg);
        pt[k] = principal_angle(b.final_snapshot().angles().back());
    });
    CHECK(ks_test_two_sample(mx, pt) > 0.01);
}

TEST_CASE("martingale covariation density") {
    SUBCASE("identity matrix, N = 1, z = 2") {
        const sim::Matrix id = sim::Matrix::Identity(1, 1);
        const auto [first, second] = sim::martingale_qv_density(id, PolarPoint(2.0, 0.0));
        CHECK(first.real() == doctest::Approx(-16.0).epsilon(1e-12));
        CHECK(std::abs(first.imag()) < 1e-12);
        CHECK(second == doctest::Approx(16.0).epsilon(1e-12));
    }
    SUBCASE("second component dominates the first in magnitude") {
        auto rng = trial_stream(8, 0);
        sim::Matrix u = sim::Matrix::Identity(12, 12);
        for (int k = 0; k < 50; ++k)
            u = sim::step_unitary(u, sim::hermitian_bm_increment(12, 1e-2, rng));
        for (double r : {1.2, 1.6, 0.7}) {
            for (double th : {0.0, 1.0, -2.2}) {
                const auto [first, second] = sim::martingale_qv_density(u, PolarPoint(r, th));
                CHECK(second >= std::abs(first) - 1e-12);
            }
        }
    }
}

TEST_CASE("realized quadratic variation matches the covariation integral") {
    // f(z, .) along a path; QV compared against the integral of the
    // instantaneous <dM, dMbar> density
    const std::size_t n = 64, trials = 60, steps = 3000;
    const double dt = 1e-4;
    const PolarPoint z(1.3, 0.7);
    std::vector<double> realized(trials), integrated(trials);
    parallel_trials(trials, 2, [&](std::size_t k) {
        auto rng = trial_stream(3000, k);
        sim::Matrix u = sim::Matrix::Identity(n, n);
        std::complex<double> f_prev = sim::matrix_cauchy_transform(u, z);
        double qv = 0.0, integral = 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
            if (s % 5 == 0) integral += 5.0 * dt * sim::martingale_qv_density(u, z).second;
            u = sim::step_unitary(u, sim::hermitian_bm_increment(n, dt, rng));
            const auto f = sim::matrix_cauchy_transform(u, z);
            qv += std::norm(f - f_prev);
            f_prev = f;
        }
        realized[k] = qv;
        integrated[k] = integral;
    });
    CHECK(mean(realized) == doctest::Approx(mean(integrated)).epsilon(0.10));
}
