#pragma once

#include <functional>
#include <span>
#include <string_view>

namespace engset {

struct QuadratureOptions {
    /// Absolute tolerance, measured against the L1 norm of the (rescaled)
    /// integrand so that it is meaningful whatever the magnitude of g.
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    long max_nodes = 200000;
    /// Plain absolute error that is always accepted (0 disables it).
    double abs_floor = 0.0;
};

/// Plain result of the adaptive engine on an ordinary double integrand.
struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    long nodes = 0;
    bool converged = false;
};

/**
 * Globally adaptive Gauss-Kronrod (7, 15) integration over the partition
 * defined by `breakpoints` (sorted, at least two entries). The interval with
 * the largest error estimate is bisected until the total error is within
 * max(abs_floor, abs_tol * L1, rel_tol * |I|) or the node budget is spent.
 */
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts = {});

enum class QuadratureMethod { Direct, PowerSubstitution, SingularitySplit };

std::string_view to_string(QuadratureMethod m);

/// An integral held in log space, with its error estimate.
struct QuadratureResult {
    double log_value = 0.0;
    int sign = 1;
    double log_abs_error = 0.0;
    long node_count = 0;
    QuadratureMethod method = QuadratureMethod::Direct;

    double value() const;
    double abs_error_estimate() const;
    double relative_error() const;
};

/**
 * Positive integrand factor g on [0, upper], described by log g and by the
 * location and width of its maximum (used to place initial breakpoints and
 * to rescale by max log g before exponentiating).
 */
struct LogProfile {
    std::function<double(double)> log_g;
    double peak = 0.0;
    double width = 1.0;
    double upper = 1.0;
};

/// log g(u) = a log(1-u) + b log(1 + r u) on [0,1].
LogProfile beta_profile(double a, double b, double r);

/// log g(u) = c1 u - c2 u^2 on [0, upper], c2 > 0.
LogProfile gauss_profile(double c1, double c2, double upper);

/**
 * \int_0^upper g(u) u^{alpha-1} du for alpha > 0.
 *
 * alpha >= 1 is integrated directly. For moderate alpha < 1 the kernel is
 * removed by v = u^alpha. For small alpha the integral is split as
 * g(0) s^alpha/alpha + \int_0^s (g(u)-g(0)) u^{alpha-1} du (+ the tail above
 * s = min(1, upper)), which stays well posed down to alpha ~ 1e-300; if that
 * split cancels too much the substitution is used instead.
 * Throws QuadratureError when the tolerance cannot be met.
 */
QuadratureResult integrate_singular_kernel(const LogProfile& g, double alpha,
                                           const QuadratureOptions& opts = {});

/// \int_0^upper g(u) u^alpha du for alpha >= 0 (no endpoint singularity).
QuadratureResult integrate_regular_kernel(const LogProfile& g, double alpha,
                                          const QuadratureOptions& opts = {});

} // namespace engset
