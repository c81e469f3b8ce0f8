#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace engset {

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    /// Unbiased sample variance.
    double variance = 0.0;
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
};

SampleSummary summarize(std::span<const double> xs);

/// sup_x |F_n(x) - cdf(x)|.
double ks_statistic(std::span<const double> xs, const std::function<double(double)>& cdf);

/// sup_x |F_n(x) - G_m(x)|.
double ks_two_sample_statistic(std::span<const double> a, std::span<const double> b);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

/// Asymptotic p-value of a KS statistic d from an effective sample size n
/// (n * m / (n + m) for two samples), with Stephens' finite-n correction.
double ks_p_value(double d, double effective_n);

/// Pearson chi-square statistic and its p-value. Cells with expected
/// count below min_expected are pooled with their neighbour.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

ChiSquareResult chi_square_test(std::span<const double> observed, std::span<const double> expected,
                                double min_expected = 5.0);

} // namespace engset
