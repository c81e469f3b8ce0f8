#include "engset/polys.hpp"

#include <cmath>

#include "engset/error.hpp"

namespace engset {

namespace {

double log_binomial(int n, int k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace

KrawtchoukBasis::KrawtchoukBasis(int n_particles, double nu)
    : n_(n_particles), nu_(nu), mu_(1.0 - nu), ratio_((1.0 - nu) / nu)
{
    require(n_particles >= 1, "N must be positive");
    require(nu > 0.0 && nu < 1.0, "nu must lie in (0,1)");
}

double KrawtchoukBasis::log_weight(int x) const
{
    return log_binomial(n_, x) + x * std::log(nu_) + (n_ - x) * std::log(mu_);
}

double KrawtchoukBasis::log_norm2(int degree) const
{
    return degree * std::log(ratio_) - log_binomial(n_, degree);
}

double KrawtchoukBasis::alternating_sum(int degree, int x) const
{
    require(degree >= 0 && degree <= n_ && x >= 0 && x <= n_,
            "Krawtchouk degree and state must lie in 0..N");
    long double sum = 0.0L;
    long double rpow = 1.0L;
    for (int l = 0; l <= degree; ++l) {
        if (l <= x && degree - l <= n_ - x) {
            long double term = std::exp(static_cast<long double>(
                                   log_binomial(x, l) + log_binomial(n_ - x, degree - l)))
                               * rpow;
            sum += (l % 2 == 0) ? term : -term;
        }
        rpow *= ratio_;
    }
    return static_cast<double>(sum / std::exp(static_cast<long double>(log_binomial(n_, degree))));
}

std::vector<double> KrawtchoukBasis::recurrence_row(int degree) const
{
    require(degree >= 0 && degree <= n_, "Krawtchouk degree must lie in 0..N");
    const int n = n_;
    const double deg = degree;
    // mu x K(x-1) + nu (N-x) K(x+1) - (mu x + nu (N-x) - n) K(x) = 0
    auto centre = [&](int x) { return mu_ * x + nu_ * (n - x) - deg; };

    std::vector<double> fwd(n + 1, 0.0);
    fwd[0] = 1.0;
    for (int x = 0; x < n; ++x) {
        double prev = x > 0 ? fwd[x - 1] : 0.0;
        fwd[x + 1] = (centre(x) * fwd[x] - mu_ * x * prev) / (nu_ * (n - x));
    }

    std::vector<double> bwd(n + 1, 0.0);
    bwd[n] = std::pow(-ratio_, degree);
    for (int x = n; x > 0; --x) {
        double next = x < n ? bwd[x + 1] : 0.0;
        bwd[x - 1] = (centre(x) * bwd[x] - nu_ * (n - x) * next) / (mu_ * x);
    }

    int splice = 0;
    double best = INFINITY;
    for (int x = 0; x <= n; ++x) {
        double denom = std::fabs(fwd[x]) + std::fabs(bwd[x]);
        double d = denom == 0.0 ? 0.0 : std::fabs(fwd[x] - bwd[x]) / denom;
        if (d < best) {
            best = d;
            splice = x;
        }
    }
    for (int x = splice + 1; x <= n; ++x) {
        fwd[x] = bwd[x];
    }
    return fwd;
}

std::vector<double> KrawtchoukBasis::row(int degree) const
{
    require(degree >= 0 && degree <= n_, "Krawtchouk degree must lie in 0..N");
    if (degree > kSumDegreeLimit) {
        return recurrence_row(degree);
    }
    std::vector<double> out(n_ + 1);
    for (int x = 0; x <= n_; ++x) {
        out[x] = alternating_sum(degree, x);
    }
    return out;
}

double KrawtchoukBasis::value(int degree, int x) const
{
    require(degree >= 0 && degree <= n_ && x >= 0 && x <= n_,
            "Krawtchouk degree and state must lie in 0..N");
    if (degree > kSumDegreeLimit) {
        return recurrence_row(degree)[x];
    }
    return alternating_sum(degree, x);
}

double krawtchouk(int degree, int x, const ModelParams& p)
{
    return KrawtchoukBasis(p).value(degree, x);
}

Residual generating_identity_residual(int x, double u, const ModelParams& p)
{
    require(std::fabs(u) <= 1.0, "generating identity is checked for |u| <= 1");
    KrawtchoukBasis basis(p);
    const int n = p.n();
    require(x >= 0 && x <= n, "state must lie in 0..N");

    long double lhs = 0.0L;
    long double mag = 0.0L;
    for (int k = 0; k <= n; ++k) {
        long double term = std::exp(static_cast<long double>(log_binomial(n, k)))
                           * basis.value(k, x) * std::pow(static_cast<long double>(u), k);
        lhs += term;
        mag += std::fabs(term);
    }
    long double rhs = std::pow(1.0L + u, n - x) * std::pow(1.0L - basis.ratio() * u, x);
    return {static_cast<double>(std::fabs(lhs - rhs)), static_cast<double>(mag + std::fabs(rhs))};
}

Residual krawtchouk_martingale_residual(int degree, const ModelParams& p, int x)
{
    require(!p.reflected(), "Krawtchouk martingales belong to the unreflected process");
    require(x >= 0 && x <= p.n(), "state must lie in 0..N");
    KrawtchoukBasis basis(p);
    auto k = basis.row(degree);
    const double up = p.up_rate(x);
    const double down = p.down_rate(x);
    double net = degree * k[x];
    double mag = std::fabs(degree * k[x]);
    if (x < p.n()) {
        net += up * (k[x + 1] - k[x]);
        mag += up * (std::fabs(k[x + 1]) + std::fabs(k[x]));
    }
    if (x > 0) {
        net += down * (k[x - 1] - k[x]);
        mag += down * (std::fabs(k[x - 1]) + std::fabs(k[x]));
    }
    return {std::fabs(net), mag};
}

} // namespace engset
