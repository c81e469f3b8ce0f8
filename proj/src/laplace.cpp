#include "engset/laplace.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "engset/error.hpp"
#include "engset/signed_log.hpp"

namespace engset {

namespace {

void check_alpha(double alpha, bool allow_zero = false)
{
    require(std::isfinite(alpha) && (alpha > 0.0 || (allow_zero && alpha == 0.0)),
            "alpha must be positive and finite");
}

void check_state(const ModelParams& p, int x)
{
    require(p.valid_state(x), "state " + std::to_string(x) + " is outside 0.." +
                                  std::to_string(p.capacity()));
}

void require_reflected(const ModelParams& p)
{
    require(p.reflected(), "b and d need a reflected Engset process (C < N); "
                           "use the Ehrenfest formulas when C = N");
}

QuadratureResult shifted(QuadratureResult r, double log_factor)
{
    r.log_value += log_factor;
    r.log_abs_error += log_factor;
    return r;
}

} // namespace

QuadratureResult coef_B(const ModelParams& p, int x, double alpha, const QuadratureOptions& opts)
{
    check_state(p, x);
    check_alpha(alpha);
    return integrate_singular_kernel(beta_profile(x, p.n() - x, p.nu() / p.mu()), alpha, opts);
}

QuadratureResult coef_D(const ModelParams& p, int x, double alpha, const QuadratureOptions& opts)
{
    check_state(p, x);
    check_alpha(alpha);
    return integrate_singular_kernel(beta_profile(p.n() - x, x, p.mu() / p.nu()), alpha, opts);
}

QuadratureResult coef_b(const ModelParams& p, double alpha, const QuadratureOptions& opts)
{
    require_reflected(p);
    check_alpha(alpha);
    const int c = p.capacity();
    auto r = integrate_regular_kernel(beta_profile(c, p.n() - c - 1, p.nu() / p.mu()), alpha, opts);
    return shifted(r, std::log(p.nu()));
}

QuadratureResult coef_d(const ModelParams& p, double alpha, const QuadratureOptions& opts)
{
    require_reflected(p);
    check_alpha(alpha);
    const int c = p.capacity();
    auto r = integrate_regular_kernel(beta_profile(p.n() - c - 1, c, p.mu() / p.nu()), alpha, opts);
    return shifted(r, std::log(p.mu()));
}

void validate(const LaplaceQuery& q)
{
    check_state(q.params, q.from_state);
    check_state(q.params, q.to_state);
    check_alpha(q.alpha);
}

std::string_view to_string(TransformFamily f)
{
    switch (f) {
    case TransformFamily::Trivial: return "trivial";
    case TransformFamily::D: return "D";
    case TransformFamily::B: return "B";
    case TransformFamily::G: return "G";
    }
    return "unknown";
}

double HittingTransform::lt() const { return std::exp(log_lt); }

HittingTransform hitting_transform(const LaplaceQuery& q, const QuadratureOptions& opts)
{
    validate(q);
    HittingTransform out;
    if (q.from_state == q.to_state) {
        return out;
    }
    const ModelParams& p = q.params;
    const double a = q.alpha / p.time_scale();

    if (q.from_state < q.to_state) {
        auto s = coef_D(p, q.from_state, a, opts);
        auto t = coef_D(p, q.to_state, a, opts);
        out.family = TransformFamily::D;
        out.log_lt = s.log_value - t.log_value;
        out.rel_error = s.relative_error() + t.relative_error();
        out.node_count = s.node_count + t.node_count;
    } else if (!p.reflected()) {
        auto s = coef_B(p, q.from_state, a, opts);
        auto t = coef_B(p, q.to_state, a, opts);
        out.family = TransformFamily::B;
        out.log_lt = s.log_value - t.log_value;
        out.rel_error = s.relative_error() + t.relative_error();
        out.node_count = s.node_count + t.node_count;
    } else {
        auto b = coef_b(p, a, opts);
        auto d = coef_d(p, a, opts);
        auto g = [&](int x, double* rel, long* nodes) {
            auto bx = coef_B(p, x, a, opts);
            auto dx = coef_D(p, x, a, opts);
            double l1 = d.log_value + bx.log_value;
            double l2 = b.log_value + dx.log_value;
            double lg = log_add_exp(l1, l2);
            *rel += std::exp(l1 - lg) * (d.relative_error() + bx.relative_error())
                    + std::exp(l2 - lg) * (b.relative_error() + dx.relative_error());
            *nodes += bx.node_count + dx.node_count;
            return lg;
        };
        out.family = TransformFamily::G;
        out.node_count = b.node_count + d.node_count;
        double ls = g(q.from_state, &out.rel_error, &out.node_count);
        double lt = g(q.to_state, &out.rel_error, &out.node_count);
        out.log_lt = ls - lt;
    }
    // Quadrature noise must not push the transform above 1.
    out.log_lt = std::fmin(out.log_lt, 0.0);
    return out;
}

double hitting_lt(const LaplaceQuery& q, const QuadratureOptions& opts)
{
    return hitting_transform(q, opts).lt();
}

double resolvent_oracle_log(const LaplaceQuery& q, const OracleOptions& opts)
{
    validate(q);
    const ModelParams& p = q.params;
    require(p.num_states() <= opts.max_states,
            "resolvent oracle is capped at " + std::to_string(opts.max_states) + " states");
    if (q.from_state == q.to_state) {
        return 0.0;
    }
    const double a = q.alpha / p.time_scale();
    double log_v = 0.0;
    if (q.from_state < q.to_state) {
        // r(x) = v(x)/v(x+1) for x below the target, carried as e = 1 - r,
        // which obeys e(x) = (a + down e(x-1)) / (a + up + down e(x-1)) with
        // no cancellation even for tiny a.
        double e = 1.0;
        for (int x = 0; x < q.to_state; ++x) {
            double carry = a + p.down_rate(x) * e;
            double denom = carry + p.up_rate(x);
            if (!(denom > 0.0)) {
                fail(ErrorCode::SingularSystem, "resolvent elimination broke down");
            }
            e = carry / denom;
            if (x >= q.from_state) {
                log_v += std::log1p(-e);
            }
        }
    } else {
        // s(x) = v(x)/v(x-1) for x above the target, carried as 1 - s.
        double e = 1.0;
        for (int x = p.capacity(); x > q.to_state; --x) {
            double carry = a + p.up_rate(x) * e;
            double denom = carry + p.down_rate(x);
            if (!(denom > 0.0)) {
                fail(ErrorCode::SingularSystem, "resolvent elimination broke down");
            }
            e = carry / denom;
            if (x <= q.from_state) {
                log_v += std::log1p(-e);
            }
        }
    }
    return log_v;
}

double resolvent_oracle(const LaplaceQuery& q, const OracleOptions& opts)
{
    return std::exp(resolvent_oracle_log(q, opts));
}

double log_mean_hitting_time(const ModelParams& p, int from, int to)
{
    check_state(p, from);
    check_state(p, to);
    if (from == to) {
        return -INFINITY;
    }
    const auto lw = log_stationary_weights(p);
    std::vector<double> terms;
    if (from < to) {
        // Crossing x -> x+1 takes pi([0,x]) / (pi(x) up(x)) on average.
        double cum = -INFINITY;
        for (int x = 0; x < to; ++x) {
            cum = log_add_exp(cum, lw[x]);
            if (x >= from) {
                terms.push_back(cum - lw[x] - std::log(p.up_rate(x)));
            }
        }
    } else {
        double cum = -INFINITY;
        for (int x = p.capacity(); x > to; --x) {
            cum = log_add_exp(cum, lw[x]);
            if (x <= from) {
                terms.push_back(cum - lw[x] - std::log(p.down_rate(x)));
            }
        }
    }
    return log_sum_exp(terms) - std::log(p.time_scale());
}

double mean_hitting_time(const ModelParams& p, int from, int to)
{
    return from == to ? 0.0 : std::exp(log_mean_hitting_time(p, from, to));
}

MeanCrossCheck mean_cross_check(const ModelParams& p, int from, int to)
{
    MeanCrossCheck out;
    out.ladder = mean_hitting_time(p, from, to);
    if (from == to) {
        return out;
    }
    // (1 - LT(a))/a = m - a m2/2 + ...; halve a and eliminate powers of a.
    constexpr int kLevels = 5;
    const double h = 1e-2 / out.ladder;
    std::array<std::array<double, kLevels>, kLevels> table{};
    for (int k = 0; k < kLevels; ++k) {
        double a = h / std::ldexp(1.0, k);
        double llt = hitting_transform({p, from, to, a}).log_lt;
        table[k][0] = -std::expm1(llt) / a;
        for (int j = 1; j <= k; ++j) {
            double f = std::ldexp(1.0, j);
            table[k][j] = (f * table[k][j - 1] - table[k - 1][j - 1]) / (f - 1.0);
        }
    }
    out.extrapolated = table[kLevels - 1][kLevels - 1];
    out.relative_gap = std::fabs(out.extrapolated - out.ladder) / out.ladder;
    return out;
}

} // namespace engset
