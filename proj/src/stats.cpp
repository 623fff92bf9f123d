#include "ubmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ubmlab {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_stddev: need n >= 2");
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {
double ks_pvalue(double d, double n_eff) {
    const double rn = std::sqrt(n_eff);
    return kolmogorov_q(d * (rn + 0.12 + 0.11 / rn));
}
} // namespace

double ks_test_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c = cdf(xs[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return ks_pvalue(d, n);
}

double ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return ks_pvalue(d, na * nb / (na + nb));
}

double sign_test_pvalue(std::size_t k, std::size_t n) {
    if (n == 0) return 1.0;
    // Exact two-sided binomial(n, 1/2) tail via log-gamma.
    auto log_binom = [&](std::size_t j) {
        return std::lgamma(static_cast<double>(n) + 1.0) -
               std::lgamma(static_cast<double>(j) + 1.0) -
               std::lgamma(static_cast<double>(n - j) + 1.0) -
               static_cast<double>(n) * std::log(2.0);
    };
    const std::size_t lo = std::min(k, n - k);
    double tail = 0.0;
    for (std::size_t j = 0; j <= lo; ++j) tail += std::exp(log_binom(j));
    return std::min(1.0, 2.0 * tail);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need matched samples, n >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate x");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    (void)n;
    return fit;
}

} // namespace ubmlab
