#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ubmlab {

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);
double median(std::vector<double> xs);  // by value: sorts a copy

double normal_cdf(double x);

// Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// One-sample KS against a continuous CDF; returns p-value.
double ks_test_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

// Two-sample KS; returns p-value.
double ks_test_two_sample(std::vector<double> a, std::vector<double> b);

// Two-sided sign test p-value for k positives out of n nonzero signs.
double sign_test_pvalue(std::size_t k, std::size_t n);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace ubmlab
