#include "ubmlab/cauchy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ubmlab {

namespace {

// Pairwise (tree) reduction; keeps accumulation error ~O(log N) ulps even
// with near-singular terms in the sum.
template <typename T>
T pairwise_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += v[i];
        return acc;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

void check_radius(const PolarPoint& z) {
    if (std::abs(z.r - 1.0) < kRadiusFloor)
        throw std::invalid_argument("cauchy transform: |r - 1| below radius floor, "
                                    "evaluation is ill-conditioned");
}

} // namespace

std::complex<double> empirical_cauchy_transform(const EigenAngleConfig& angles,
                                                const PolarPoint& z) {
    check_radius(z);
    const std::complex<double> zc = z.to_complex();
    std::vector<std::complex<double>> terms(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const std::complex<double> lam = std::polar(1.0, angles.angle(i));
        terms[i] = (lam + zc) / (lam - zc);
    }
    return pairwise_sum(terms, 0, terms.size()) / static_cast<double>(angles.size());
}

std::pair<double, double> real_part_identity(const EigenAngleConfig& angles,
                                             const PolarPoint& z) {
    check_radius(z);
    const double lhs = empirical_cauchy_transform(angles, z).real();
    const std::complex<double> zc = z.to_complex();
    const double one_minus_z2 = 1.0 - z.r * z.r;
    std::vector<double> terms(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const std::complex<double> lam = std::polar(1.0, angles.angle(i));
        terms[i] = one_minus_z2 / std::norm(lam - zc);
    }
    const double rhs = pairwise_sum(terms, 0, terms.size()) / static_cast<double>(angles.size());
    return {lhs, rhs};
}

} // namespace ubmlab
