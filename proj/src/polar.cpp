#include "ubmlab/polar.hpp"

#include <cmath>

#include "ubmlab/biane.hpp"

namespace ubmlab {

EdgeCoordinates edge_coordinates(const PolarPoint& z, double t) {
    if (!(t > 0.0 && t < 4.0))
        throw std::invalid_argument("edge_coordinates: need 0 < t < 4");
    // kappa is measured from |theta| so the two edges are treated symmetrically.
    return EdgeCoordinates{z.eta(), std::abs(z.theta) - biane::theta_edge(t)};
}

ControlParameter control_parameter(const EdgeCoordinates& coords, std::size_t n_particles) {
    if (!(coords.eta > 0.0)) throw std::invalid_argument("control_parameter: eta must be > 0");
    if (n_particles == 0) throw std::invalid_argument("control_parameter: N must be >= 1");
    const double n = static_cast<double>(n_particles);
    if (coords.kappa > 0.0) {
        return ControlParameter{1.0 / (n * std::sqrt((coords.kappa + coords.eta) * coords.eta)),
                                true};
    }
    return ControlParameter{1.0 / (n * coords.eta), false};
}

} // namespace ubmlab
