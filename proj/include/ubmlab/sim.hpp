#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ubmlab/eigen_config.hpp"
#include "ubmlab/polar.hpp"

namespace ubmlab::sim {

using Matrix = Eigen::MatrixXcd;

enum class Mode { matrix, particles };

struct SimConfig {
    std::size_t n = 32;
    double t_final = 1.0;
    double dt = 1e-3;
    double beta = 2.0;           // particle mode; matrix mode fixes beta = 2
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;     // stream index under the master seed
    Mode mode = Mode::matrix;
    std::vector<double> snapshot_times;  // t_final is always included

    // matrix mode: max spacing between eigenangle extractions used for
    // winding-aware tracking (kept <= 1e-2).
    double tracking_spacing = 1e-2;
    // matrix mode: when false, eigenangles are extracted at snapshot times
    // only and reported as principal values (no winding bookkeeping). Cheaper
    // for observables that do not need unwrapped angles, e.g. traces.
    bool track_winding = true;
    // particle mode: sub-step halving triggers below this angular gap.
    double gap_floor_scale = 1e-8;

    void validate() const;
};

struct Trajectory {
    SimConfig config;
    std::uint64_t stream_id = 0;
    std::vector<EigenAngleConfig> snapshots;    // at requested snapshot times
    std::vector<double> com_trace;              // Re tr(W_t)/N per snapshot (matrix mode)
    double max_unitarity_defect = 0.0;          // matrix mode
    std::size_t substep_halvings = 0;           // particle mode

    const EigenAngleConfig& final_snapshot() const { return snapshots.back(); }
};

// Hermitian Brownian increment (X + X^T + i(X' - X'^T))/sqrt(4N) with
// N(0, dt) entries; E|dW_ij|^2 = dt/N for every entry.
Matrix hermitian_bm_increment(std::size_t n, double dt, std::mt19937_64& rng);

// One step of the unitary integrator, U' = U exp(i dW). Re-orthonormalizes
// first when the unitarity defect of U exceeds 1e-8.
Matrix step_unitary(const Matrix& u, const Matrix& dw);

// Instantaneous covariation densities of the Cauchy-transform martingale:
// (-4 z^2 / N^3 tr(U^2/(U-z)^4),  4|z|^2 / N^3 tr(|U|^2/|U-z|^4)).
std::pair<std::complex<double>, double> martingale_qv_density(const Matrix& u,
                                                              const PolarPoint& z);

Trajectory simulate(const SimConfig& config);

// Empirical transform evaluated from the matrix, (1/N) tr((U+z)(U-z)^{-1}).
std::complex<double> matrix_cauchy_transform(const Matrix& u, const PolarPoint& z);

// Helpers shared with tests.
double unitarity_defect(const Matrix& u);
Matrix exp_i_hermitian(const Matrix& h);  // exp(i h) for Hermitian h

} // namespace ubmlab::sim
