#pragma once

#include <stdexcept>
#include <string>

namespace ubmlab {

// Root-finding gave up before meeting the residual contract. Carries the last
// residual so callers can report how far off the solve ended.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what + " (last residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double residual)
        : std::runtime_error(what + " (error estimate " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace ubmlab
