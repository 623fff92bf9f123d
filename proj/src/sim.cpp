#include "ubmlab/sim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ubmlab/errors.hpp"
#include "ubmlab/rng.hpp"

namespace ubmlab::sim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix newton_schulz_unitarize(Matrix u) {
    for (int i = 0; i < 3; ++i) {
        const double defect = unitarity_defect(u);
        if (defect < 1e-15) break;
        u = 1.5 * u - 0.5 * u * (u.adjoint() * u);
    }
    return u;
}

// Winding-aware matching of freshly extracted principal angles onto the
// previous unwrapped configuration. The circular order is preserved by the
// dynamics, so the new configuration is a cyclic shift plus a global number
// of turns; both are chosen to minimize the worst angle displacement.
std::vector<double> match_unwrapped(const std::vector<double>& prev,
                                    const std::vector<double>& fresh_sorted) {
    const std::size_t n = prev.size();
    std::vector<double> best, cand(n);
    double best_cost = std::numeric_limits<double>::infinity();
    auto try_shift = [&](std::size_t r) {
        // the whole-turn count is pinned by slot 0 once the shift is fixed
        const int w = static_cast<int>(std::lround((prev[0] - fresh_sorted[r]) / kTwoPi));
        double cost = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = (r + j) % n;
            const double turns = static_cast<double>((r + j) / n + w);
            cand[j] = fresh_sorted[idx] + kTwoPi * turns;
            cost = std::max(cost, std::abs(cand[j] - prev[j]));
            if (cost >= best_cost) return;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = cand;
        }
    };
    // the shift moves by at most a few slots between tracking extractions;
    // search a window around the slot closest to prev[0], with a full scan as
    // a fallback
    const double p0 = principal_angle(prev[0]);
    const std::size_t idx0 = static_cast<std::size_t>(
        std::lower_bound(fresh_sorted.begin(), fresh_sorted.end(), p0) - fresh_sorted.begin());
    for (std::ptrdiff_t off = -6; off <= 6; ++off)
        try_shift(static_cast<std::size_t>((static_cast<std::ptrdiff_t>(idx0 + n) + off) %
                                           static_cast<std::ptrdiff_t>(n)));
    if (best_cost > 0.5 * kPi)
        for (std::size_t r = 0; r < n; ++r) try_shift(r);
    if (best_cost > 0.5 * kPi)
        throw std::runtime_error("eigenangle tracking lost continuity between snapshots");
    return best;
}

std::vector<double> extract_sorted_principal(const Matrix& u) {
    Eigen::ComplexSchur<Matrix> schur(u, /*computeU=*/false);
    std::vector<double> angles(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        angles[static_cast<std::size_t>(i)] = std::arg(schur.matrixT()(i, i));
    std::sort(angles.begin(), angles.end());
    return angles;
}

// chi-distributed draw with k degrees of freedom (Dumitriu-Edelman tridiagonal).
double chi_draw(double k, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(0.5 * k, 2.0);
    return std::sqrt(gamma(rng));
}

// Sorted eigenvalues of the general-beta tridiagonal ensemble, normalized so
// the spectrum converges to the semicircle on [-2, 2]. Used to seed the
// particle dynamics at a small positive time, where the circular system is a
// rescaled flat one to O(t0).
std::vector<double> gbe_semicircle_sample(std::size_t n, double beta, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(std::max<Eigen::Index>(0, static_cast<Eigen::Index>(n) - 1));
    const double scale = 1.0 / std::sqrt(beta * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        diag[static_cast<Eigen::Index>(i)] = std::sqrt(2.0) * normal(rng) * scale;
    for (std::size_t i = 0; i + 1 < n; ++i)
        sub[static_cast<Eigen::Index>(i)] =
            chi_draw(beta * static_cast<double>(n - 1 - i), rng) * scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    std::sort(out.begin(), out.end());
    return out;
}

// Pairwise cotangent drift of the circular interacting system,
// drift_i = (1/2N) sum_{j != i} cot((theta_i - theta_j)/2). The cotangent is
// tamed per pair so one drift step separates a pair by at most one gap:
// |cot| is capped at (N/h) |sin((theta_i - theta_j)/2)|, which restores the
// exact drift as h -> 0 but prevents slingshot overshoot when the noise has
// pushed a pair far below the local equilibrium spacing.
void cot_drift_tamed(const std::vector<double>& theta, double h, std::vector<double>& drift) {
    const std::size_t n = theta.size();
    static thread_local std::vector<double> c, s;
    c.resize(n);
    s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = std::cos(0.5 * theta[i]);
        s[i] = std::sin(0.5 * theta[i]);
    }
    std::fill(drift.begin(), drift.end(), 0.0);
    const double cap_per_sin = static_cast<double>(n) / h;
    for (std::size_t i = 1; i < n; ++i) {
        const double ci = c[i], si = s[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double den = si * c[j] - ci * s[j];  // sin((theta_i - theta_j)/2)
            const double num = ci * c[j] + si * s[j];
            double v = num / den;
            const double cap = cap_per_sin * std::abs(den);
            v = std::clamp(v, -cap, cap);
            acc += v;
            drift[j] -= v;
        }
        drift[i] += acc;
    }
    const double inv = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) drift[i] *= inv;
}

// Stepping engine with preallocated workspace; exp(i dW) is the degree-8
// Paterson-Stockmeyer Taylor (never needs scaling at these step norms, but
// falls back to the general path if it would).
struct MatrixEngine {
    explicit MatrixEngine(const SimConfig& cfg)
        : cfg(cfg), rng(trial_stream(cfg.seed, cfg.trial)),
          normal(0.0, 1.0),
          n(static_cast<Eigen::Index>(cfg.n)),
          u(Matrix::Identity(n, n)),
          dw(n, n), a2(n, n), a3(n, n), b(n, n), e(n, n), tmp(n, n),
          unwrapped(cfg.n, 0.0) {}

    void fill_increment() {
        const double diag_sd = std::sqrt(cfg.dt / static_cast<double>(cfg.n));
        const double off_sd = std::sqrt(0.5 * cfg.dt / static_cast<double>(cfg.n));
        for (Eigen::Index i = 0; i < n; ++i) {
            dw(i, i) = diag_sd * normal(rng);
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const std::complex<double> v(off_sd * normal(rng), off_sd * normal(rng));
                dw(i, j) = v;
                dw(j, i) = std::conj(v);
            }
        }
    }

    void step() {
        fill_increment();
        tr_w += dw.trace().real();
        a2.noalias() = dw * dw;
        a3.noalias() = a2 * dw;
        // ||dw^3||_F^{1/3} >= ||dw||_2 but is tight for diffusive increments,
        // unlike the 1-norm which overshoots by sqrt(N)
        const double norm_est = std::cbrt(a3.norm());
        if (norm_est > 0.17) {
            u = step_unitary(u, dw);  // cold path for outsized increments
        } else {
            // with A = i dw: A^2 = -dw^2, A^3 = -i dw^3
            const std::complex<double> im(0.0, 1.0);
            b = (im / 5040.0) * dw - (1.0 / 40320.0) * a2;
            b.diagonal().array() += 1.0 / 720.0;
            tmp.noalias() = a3 * b;
            b = (im / 24.0) * dw - (1.0 / 120.0) * a2;
            b.diagonal().array() += 1.0 / 6.0;
            b -= im * tmp;  // A^3 * b_high = -i (dw^3 b_high)
            e.noalias() = a3 * b;
            e = -im * e;
            e += im * dw - 0.5 * a2;
            e.diagonal().array() += 1.0;
            tmp.noalias() = u * e;
            u.swap(tmp);
        }
        if (++steps_since_orth >= 256) {
            u = newton_schulz_unitarize(u);
            steps_since_orth = 0;
        }
    }

    void advance_to(double target, double now) {
        const std::size_t steps =
            static_cast<std::size_t>(std::llround((target - now) / cfg.dt));
        for (std::size_t k = 0; k < steps; ++k) step();
    }

    void track(double time) {
        const auto fresh = extract_sorted_principal(u);
        if (time == 0.0 || first_track) {
            unwrapped = fresh;
            first_track = false;
        } else {
            unwrapped = match_unwrapped(unwrapped, fresh);
        }
        max_defect = std::max(max_defect, unitarity_defect(u));
    }

    const SimConfig& cfg;
    std::mt19937_64 rng;
    std::normal_distribution<double> normal;
    Eigen::Index n;
    Matrix u;
    Matrix dw, a2, a3, b, e, tmp;
    std::vector<double> unwrapped;
    double tr_w = 0.0;
    double max_defect = 0.0;
    std::size_t steps_since_orth = 0;
    bool first_track = true;
};

} // namespace

void SimConfig::validate() const {
    if (n == 0) throw std::invalid_argument("SimConfig: N >= 1 required");
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt > 0 required");
    if (!(t_final >= 0.0)) throw std::invalid_argument("SimConfig: t_final >= 0 required");
    if (t_final > 0.0 && t_final < dt) throw std::invalid_argument("SimConfig: t_final >= dt required");
    if (mode == Mode::particles && !(beta >= 1.0))
        throw std::invalid_argument("SimConfig: beta >= 1 required in particle mode");
    if (mode == Mode::matrix && beta != 2.0)
        throw std::invalid_argument("SimConfig: matrix mode fixes beta = 2");
    for (double s : snapshot_times)
        if (!(s >= 0.0 && s <= t_final))
            throw std::invalid_argument("SimConfig: snapshot times must lie in [0, t_final]");
}

double unitarity_defect(const Matrix& u) {
    const Matrix g = u * u.adjoint() - Matrix::Identity(u.rows(), u.cols());
    return g.cwiseAbs().maxCoeff();
}

Matrix hermitian_bm_increment(std::size_t n, double dt, std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("hermitian_bm_increment: dt > 0 required");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double diag_sd = std::sqrt(dt / static_cast<double>(n));
    const double off_sd = std::sqrt(0.5 * dt / static_cast<double>(n));
    Matrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        w(i, i) = diag_sd * normal(rng);
        for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
            const std::complex<double> v(off_sd * normal(rng), off_sd * normal(rng));
            w(i, j) = v;
            w(j, i) = std::conj(v);
        }
    }
    return w;
}

Matrix exp_i_hermitian(const Matrix& h) {
    const double norm1 = h.cwiseAbs().rowwise().sum().maxCoeff();
    if (!std::isfinite(norm1))
        throw SolverError("matrix exponential: non-finite input", norm1);
    const Matrix a = std::complex<double>(0.0, 1.0) * h;
    int squarings = 0;
    Matrix base = a;
    double scaled = norm1;
    while (scaled > 0.25) {
        scaled *= 0.5;
        ++squarings;
    }
    if (squarings > 0) base = a / std::pow(2.0, squarings);
    // degree-8 Taylor via Paterson-Stockmeyer; |base| <= 1/4 keeps the
    // truncation at ~1e-16
    const Matrix a2 = base * base;
    const Matrix a3 = a2 * base;
    const Eigen::Index n = h.rows();
    const Matrix id = Matrix::Identity(n, n);
    auto block = [&](double c0, double c1, double c2) -> Matrix {
        return c0 * id + c1 * base + c2 * a2;
    };
    const Matrix b0 = block(1.0, 1.0, 1.0 / 2.0);
    const Matrix b1 = block(1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0);
    const Matrix b2 = block(1.0 / 720.0, 1.0 / 5040.0, 1.0 / 40320.0);
    Matrix e = b0 + a3 * (b1 + a3 * b2);
    for (int k = 0; k < squarings; ++k) e = e * e;
    return e;
}

Matrix step_unitary(const Matrix& u, const Matrix& dw) {
    if (u.rows() != dw.rows() || u.cols() != dw.cols())
        throw std::invalid_argument("step_unitary: shape mismatch");
    Matrix base = u;
    if (unitarity_defect(base) > 1e-8) base = newton_schulz_unitarize(base);
    return base * exp_i_hermitian(dw);
}

std::complex<double> matrix_cauchy_transform(const Matrix& u, const PolarPoint& z) {
    if (std::abs(z.r - 1.0) < 1e-12)
        throw std::invalid_argument("matrix_cauchy_transform: z too close to the circle");
    const Eigen::Index n = u.rows();
    const std::complex<double> zc = z.to_complex();
    const Matrix num = u + zc * Matrix::Identity(n, n);
    const Matrix den = u - zc * Matrix::Identity(n, n);
    return (den.partialPivLu().solve(num)).trace() / static_cast<double>(n);
}

std::pair<std::complex<double>, double> martingale_qv_density(const Matrix& u,
                                                              const PolarPoint& z) {
    if (std::abs(z.r - 1.0) < 1e-12)
        throw std::invalid_argument("martingale_qv_density: z too close to the circle");
    const Eigen::Index n = u.rows();
    const double dn = static_cast<double>(n);
    const std::complex<double> zc = z.to_complex();
    const Matrix x = (u - zc * Matrix::Identity(n, n)).partialPivLu().solve(Matrix::Identity(n, n));
    const Matrix y = u * x * x;                    // U (U - z)^{-2}
    const std::complex<double> tr_y2 = (y * y).trace();
    const Matrix m = x * x.adjoint();              // eigenvalues 1/|lambda - z|^2
    const double tr_m2 = m.squaredNorm();          // sum 1/|lambda - z|^4
    const std::complex<double> first = -4.0 * zc * zc / (dn * dn * dn) * tr_y2;
    const double second = 4.0 * std::norm(zc) / (dn * dn * dn) * tr_m2;
    return {first, second};
}

Trajectory simulate(const SimConfig& config) {
    config.validate();
    Trajectory traj;
    traj.config = config;
    traj.stream_id = splitmix64(config.seed ^ splitmix64(config.trial + 0x51ULL));

    std::vector<double> snaps = config.snapshot_times;
    snaps.push_back(config.t_final);
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

    if (config.t_final == 0.0) {
        traj.snapshots.emplace_back(0.0, std::vector<double>(config.n, 0.0));
        traj.com_trace.push_back(0.0);
        return traj;
    }

    if (config.mode == Mode::matrix) {
        MatrixEngine eng(config);
        // extraction grid: every requested snapshot, plus forced spacing for
        // continuous winding tracking when unwrapped angles are wanted
        std::vector<double> grid = snaps;
        if (config.track_winding) {
            const double spacing = std::min(config.tracking_spacing, 1e-2);
            for (double s = 0.0; s < config.t_final; s += spacing) grid.push_back(s);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        // snap grid times onto the step lattice
        for (double& g : grid) g = std::round(g / config.dt) * config.dt;
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

        double now = 0.0;
        std::size_t next_snap = 0;
        for (double g : grid) {
            eng.advance_to(g, now);
            now = g;
            if (config.track_winding)
                eng.track(now);
            else
                eng.max_defect = std::max(eng.max_defect, unitarity_defect(eng.u));
            while (next_snap < snaps.size() &&
                   std::abs(snaps[next_snap] - now) <= 0.5 * config.dt) {
                traj.snapshots.emplace_back(snaps[next_snap],
                                            config.track_winding
                                                ? eng.unwrapped
                                                : extract_sorted_principal(eng.u));
                traj.com_trace.push_back(eng.tr_w / static_cast<double>(config.n));
                ++next_snap;
            }
        }
        traj.max_unitarity_defect = eng.max_defect;
        if (traj.max_unitarity_defect > 1e-10)
            throw std::runtime_error("simulate: unitarity defect exceeded 1e-10");
        return traj;
    }

    // particle mode: Euler-Maruyama with adaptive sub-stepping. The system is
    // seeded at a small positive time from the tridiagonal beta-ensemble,
    // since all particles start at the same point and the coinciding-start
    // drift is not representable in floating point.
    auto rng = trial_stream(config.seed, config.trial, /*stream_tag=*/1);
    const double t0 = std::min(1e-4, 0.01 * config.t_final);
    std::vector<double> theta = gbe_semicircle_sample(config.n, config.beta, rng);
    for (double& x : theta) x *= std::sqrt(t0);

    const double gap_floor = config.gap_floor_scale * kTwoPi / static_cast<double>(config.n);
    const double noise_sd_unit = std::sqrt(2.0 / (static_cast<double>(config.n) * config.beta));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> drift(config.n), proposal(config.n);

    // crossings caused by one noise draw are a label exchange of the
    // exchangeable system; sorting restores the ordered representative.
    // The floor and the one-turn window stay hard constraints.
    auto ordered_with_floor = [&](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] - v[i - 1] > gap_floor)) return false;
        return v.back() - v.front() < kTwoPi - gap_floor;
    };

    double now = t0;
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= now) {
        // snapshots at 0 are the coinciding start; anything else before the
        // seeding time is reported at the seed state
        if (snaps[next_snap] == 0.0)
            traj.snapshots.emplace_back(0.0, std::vector<double>(config.n, 0.0));
        else
            traj.snapshots.emplace_back(snaps[next_snap], theta);
        traj.com_trace.push_back(0.0);
        ++next_snap;
    }
    while (now < config.t_final - 1e-15) {
        double target = config.t_final;
        if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
        double remaining = target - now;
        double h = std::min(config.dt, remaining);
        for (;;) {
            cot_drift_tamed(theta, h, drift);
            const double sd = noise_sd_unit * std::sqrt(h);
            for (std::size_t i = 0; i < config.n; ++i)
                proposal[i] = theta[i] + h * drift[i] + sd * normal(rng);
            if (ordered_with_floor(proposal)) break;
            h *= 0.5;
            ++traj.substep_halvings;
            if (h < config.dt * std::pow(2.0, -20.0))
                throw std::runtime_error("simulate: particle sub-step underflow (collision)");
        }
        theta.swap(proposal);
        now += h;
        if (next_snap < snaps.size() && now >= snaps[next_snap] - 1e-15) {
            traj.snapshots.emplace_back(snaps[next_snap], theta);
            traj.com_trace.push_back(0.0);
            ++next_snap;
        }
    }
    while (next_snap < snaps.size()) {
        traj.snapshots.emplace_back(snaps[next_snap], theta);
        traj.com_trace.push_back(0.0);
        ++next_snap;
    }
    return traj;
}

} // namespace ubmlab::sim
