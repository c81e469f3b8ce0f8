#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>

namespace engset {

/// A real number stored as sign * exp(log_abs). Zero has sign 0 and
/// log_abs = -inf.
struct SignedLog {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static SignedLog from_value(double v)
    {
        if (v == 0.0) {
            return {};
        }
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }

    static SignedLog from_log(double log_abs, int sign = 1)
    {
        if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) {
            return {};
        }
        return {log_abs, sign};
    }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    bool is_zero() const { return sign == 0; }

    friend SignedLog operator*(SignedLog a, SignedLog b)
    {
        if (a.sign == 0 || b.sign == 0) {
            return {};
        }
        return {a.log_abs + b.log_abs, a.sign * b.sign};
    }

    friend SignedLog operator/(SignedLog a, SignedLog b)
    {
        if (a.sign == 0) {
            return {};
        }
        return {a.log_abs - b.log_abs, a.sign * b.sign};
    }

    SignedLog operator-() const { return {log_abs, -sign}; }
};

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b)
{
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    if (a == ninf) {
        return b;
    }
    if (b == ninf) {
        return a;
    }
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// Signed sum in log space. Exact cancellation yields zero.
inline SignedLog operator+(SignedLog a, SignedLog b)
{
    if (a.sign == 0) {
        return b;
    }
    if (b.sign == 0) {
        return a;
    }
    if (a.log_abs < b.log_abs) {
        std::swap(a, b);
    }
    double d = std::exp(b.log_abs - a.log_abs);
    if (a.sign == b.sign) {
        return {a.log_abs + std::log1p(d), a.sign};
    }
    if (d == 1.0) {
        return {};
    }
    return {a.log_abs + std::log1p(-d), a.sign};
}

inline SignedLog operator-(SignedLog a, SignedLog b) { return a + (-b); }

/// log(sum exp(v_i)) with max subtraction.
inline double log_sum_exp(std::span<const double> v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        m = std::fmax(m, x);
    }
    if (!std::isfinite(m)) {
        return m;
    }
    double s = 0.0;
    for (double x : v) {
        s += std::exp(x - m);
    }
    return m + std::log(s);
}

/// Sum of signed terms together with the sum of their magnitudes, both
/// reported relative to the largest term so nothing overflows.
struct CancellationSum {
    double log_scale = -std::numeric_limits<double>::infinity();
    double net = 0.0;       ///< signed sum / exp(log_scale)
    double magnitude = 0.0; ///< sum of |terms| / exp(log_scale)

    double relative() const { return magnitude == 0.0 ? 0.0 : std::fabs(net) / magnitude; }
};

inline CancellationSum cancellation_sum(std::span<const SignedLog> terms)
{
    CancellationSum out;
    for (const auto& t : terms) {
        if (t.sign != 0) {
            out.log_scale = std::fmax(out.log_scale, t.log_abs);
        }
    }
    if (!std::isfinite(out.log_scale)) {
        return out;
    }
    for (const auto& t : terms) {
        if (t.sign == 0) {
            continue;
        }
        double v = std::exp(t.log_abs - out.log_scale);
        out.net += t.sign * v;
        out.magnitude += v;
    }
    return out;
}

} // namespace engset
