#include "engset/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "engset/error.hpp"

namespace engset {

SampleSummary summarize(std::span<const double> xs)
{
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) {
        return s;
    }
    double sum = 0.0;
    s.min = xs[0];
    s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::fmin(s.min, x);
        s.max = std::fmax(s.max, x);
    }
    s.mean = sum / s.count;
    if (s.count > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.variance = ss / (s.count - 1);
        s.std_error = std::sqrt(s.variance / s.count);
    }
    return s;
}

double ks_statistic(std::span<const double> xs, const std::function<double(double)>& cdf)
{
    require(!xs.empty(), "KS statistic of an empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double f = cdf(v[i]);
        d = std::fmax(d, std::fmax((i + 1) / n - f, f - i / n));
    }
    return d;
}

double ks_two_sample_statistic(std::span<const double> a, std::span<const double> b)
{
    require(!a.empty() && !b.empty(), "KS statistic of an empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) {
            ++i;
        }
        while (j < y.size() && y[j] == v) {
            ++j;
        }
        d = std::fmax(d, std::fabs(static_cast<double>(i) / x.size()
                                   - static_cast<double>(j) / y.size()));
    }
    return d;
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0) {
        return 1.0;
    }
    if (x < 1.0) {
        // Jacobi-transformed series converges fast for small x.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            double m = 2 * k - 1;
            s += std::exp(-m * m * pi2 / (8.0 * x * x));
        }
        return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) {
            break;
        }
    }
    return std::clamp(s, 0.0, 1.0);
}

double ks_p_value(double d, double effective_n)
{
    require(effective_n > 0.0, "effective sample size must be positive");
    const double rn = std::sqrt(effective_n);
    return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
}

ChiSquareResult chi_square_test(std::span<const double> observed, std::span<const double> expected,
                                double min_expected)
{
    require(observed.size() == expected.size() && !observed.empty(),
            "observed and expected counts must have the same nonzero length");
    std::vector<double> o;
    std::vector<double> e;
    double acc_o = 0.0;
    double acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += observed[i];
        acc_e += expected[i];
        if (acc_e >= min_expected) {
            o.push_back(acc_o);
            e.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (e.empty()) {
            o.push_back(acc_o);
            e.push_back(acc_e);
        } else {
            o.back() += acc_o;
            e.back() += acc_e;
        }
    }
    ChiSquareResult r;
    for (std::size_t i = 0; i < o.size(); ++i) {
        r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    }
    r.dof = static_cast<int>(o.size()) - 1;
    r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
    return r;
}

} // namespace engset
