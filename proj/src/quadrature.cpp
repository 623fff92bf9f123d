#include "ubmlab/quadrature.hpp"

#include <array>
#include <cmath>

#include "ubmlab/errors.hpp"

namespace ubmlab {

namespace {

// Abscissae/weights for 16-point Gauss-Legendre on [-1, 1] (positive half).
constexpr std::array<double, 8> kGl16X = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGl16W = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0) throw QuadratureError("adaptive_simpson: depth exhausted", std::abs(err));
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double gauss_legendre_16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        acc += kGl16W[i] * (f(c - h * kGl16X[i]) + f(c + h * kGl16X[i]));
    return acc * h;
}

double gauss_legendre_composite(const std::function<double(double)>& f, double a, double b,
                                std::size_t panels) {
    if (panels == 0) panels = 1;
    double acc = 0.0;
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k)
        acc += gauss_legendre_16(f, a + h * static_cast<double>(k),
                                 a + h * static_cast<double>(k + 1));
    return acc;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

} // namespace ubmlab
