#pragma once

#include "engset/model.hpp"
#include "engset/quadrature.hpp"

namespace engset {

/**
 * Transform coefficients of the hitting-time Laplace transforms. alpha is in
 * model time units (rates normalized to nu + mu = 1).
 *
 *   B_x(a) = \int_0^1 (1-u)^x (1 + (nu/mu) u)^{N-x} u^{a-1} du
 *   D_x(a) = \int_0^1 (1-u)^{N-x} (1 + (mu/nu) u)^x u^{a-1} du
 *   b(a)   = nu \int_0^1 (1-u)^C (1 + (nu/mu) u)^{N-C-1} u^a du
 *   d(a)   = mu \int_0^1 (1-u)^{N-C-1} (1 + (mu/nu) u)^C u^a du
 *
 * b and d exist only for a reflected Engset process (C < N).
 */
QuadratureResult coef_B(const ModelParams& p, int x, double alpha, const QuadratureOptions& opts = {});
QuadratureResult coef_D(const ModelParams& p, int x, double alpha, const QuadratureOptions& opts = {});
QuadratureResult coef_b(const ModelParams& p, double alpha, const QuadratureOptions& opts = {});
QuadratureResult coef_d(const ModelParams& p, double alpha, const QuadratureOptions& opts = {});

/// E_from[exp(-alpha T_to)], alpha in the caller's time units.
struct LaplaceQuery {
    ModelParams params;
    int from_state = 0;
    int to_state = 0;
    double alpha = 1.0;
};

void validate(const LaplaceQuery& q);

enum class TransformFamily { Trivial, D, B, G };

std::string_view to_string(TransformFamily f);

struct HittingTransform {
    double log_lt = 0.0;
    /// Combined relative error estimate of the two quadratures.
    double rel_error = 0.0;
    TransformFamily family = TransformFamily::Trivial;
    long node_count = 0;

    double lt() const;
};

/**
 * Ratio F(from)/F(to) with F = D for upward hits, B for downward hits of the
 * Ehrenfest process and G = d B + b D for downward hits of the reflected
 * Engset process.
 */
HittingTransform hitting_transform(const LaplaceQuery& q, const QuadratureOptions& opts = {});
double hitting_lt(const LaplaceQuery& q, const QuadratureOptions& opts = {});

struct OracleOptions {
    int max_states = 2000;
};

/**
 * Log of the transform from the tridiagonal system (alpha - Q~) v = 0,
 * v(to) = 1, with the target absorbing. Solved by forward elimination, which
 * here reduces to a product of positive continued-fraction ratios.
 */
double resolvent_oracle_log(const LaplaceQuery& q, const OracleOptions& opts = {});
double resolvent_oracle(const LaplaceQuery& q, const OracleOptions& opts = {});

/// log E_from[T_to] in the caller's time units (ladder formula).
double log_mean_hitting_time(const ModelParams& p, int from, int to);
double mean_hitting_time(const ModelParams& p, int from, int to);

struct MeanCrossCheck {
    double ladder = 0.0;
    double extrapolated = 0.0;
    double relative_gap = 0.0;
};

/// Ladder mean against Richardson extrapolation of (1 - LT(a))/a as a -> 0.
MeanCrossCheck mean_cross_check(const ModelParams& p, int from, int to);

} // namespace engset
