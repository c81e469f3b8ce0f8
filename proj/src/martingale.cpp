#include "engset/martingale.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "engset/error.hpp"
#include "engset/laplace.hpp"
#include "engset/quadrature.hpp"

namespace engset {

namespace {

SignedLog signed_pow(double base, int k)
{
    if (k == 0) {
        return SignedLog::from_log(0.0);
    }
    if (base == 0.0) {
        return {};
    }
    int sign = (base < 0.0 && (k % 2 != 0)) ? -1 : 1;
    return SignedLog::from_log(k * std::log(std::fabs(base)), sign);
}

SignedLog scaled(SignedLog v, double factor) { return v * SignedLog::from_value(factor); }

Residual residual_of(std::span<const SignedLog> terms)
{
    auto s = cancellation_sum(terms);
    if (!std::isfinite(s.log_scale)) {
        return {};
    }
    double f = std::exp(s.log_scale);
    return {std::fabs(s.net) * f, s.magnitude * f};
}

void check_martingale_args(const ModelParams& p, int x, double t)
{
    require(!p.reflected(), "exponential martingales need the unreflected (Ehrenfest) process");
    require(p.valid_state(x), "state outside 0..N");
    require(t >= 0.0 && std::isfinite(t), "time must be finite and nonnegative");
}

// Generator terms up(x)(F(x+1)-F(x)) + down(x)(F(x-1)-F(x)), each kept apart.
void append_generator_terms(const ModelParams& p, int x, const std::function<SignedLog(int)>& f,
                            std::vector<SignedLog>& out)
{
    const SignedLog fx = f(x);
    double up = p.up_rate(x);
    double down = p.down_rate(x);
    if (up > 0.0) {
        out.push_back(scaled(f(x + 1), up));
        out.push_back(scaled(fx, -up));
    }
    if (down > 0.0) {
        out.push_back(scaled(f(x - 1), down));
        out.push_back(scaled(fx, -down));
    }
}

double over_beta(const ModelParams& p, double alpha, int x, double t, double sign_mu,
                 double scale_rate)
{
    // beta = s * v with v in [0, e^{-t}/scale_rate]; sign_mu = +1 for I, -1 for J.
    require(p.valid_state(x), "state outside 0..N");
    require(alpha > 0.0, "alpha must be positive");
    const int n = p.n();
    const double et = std::exp(t);
    const double mu = p.mu();
    const double nu = p.nu();
    const double upper = 1.0 / (et * scale_rate);
    LogProfile g;
    g.upper = upper;
    g.log_g = [=](double v) {
        double beta = sign_mu * v;
        double a = std::fmax(-1.0, -beta * mu * et);
        double b = std::fmax(-1.0, beta * nu * et);
        double la = x == 0 ? 0.0 : x * std::log1p(a);
        double lb = n - x == 0 ? 0.0 : (n - x) * std::log1p(b);
        return la + lb;
    };
    LogProfile u = sign_mu > 0 ? beta_profile(x, n - x, nu / mu) : beta_profile(n - x, x, mu / nu);
    g.peak = u.peak * upper;
    g.width = u.width * upper;
    auto r = integrate_singular_kernel(g, alpha);
    return alpha * std::log(scale_rate) + r.log_value;
}

} // namespace

SignedLog exp_martingale_value(const ModelParams& p, double beta, int x, double t)
{
    check_martingale_args(p, x, t);
    const double et = std::exp(t);
    return signed_pow(1.0 - beta * p.mu() * et, x) * signed_pow(1.0 + beta * p.nu() * et, p.n() - x);
}

Residual harmonicity_residual(const ModelParams& p, double beta, int x, double t)
{
    check_martingale_args(p, x, t);
    const int n = p.n();
    const double et = std::exp(t);
    const double a = 1.0 - beta * p.mu() * et;
    const double b = 1.0 + beta * p.nu() * et;
    std::vector<SignedLog> terms;
    if (x > 0) {
        terms.push_back(scaled(signed_pow(a, x - 1) * signed_pow(b, n - x), -x * beta * p.mu() * et));
    }
    if (x < n) {
        terms.push_back(
            scaled(signed_pow(a, x) * signed_pow(b, n - x - 1), (n - x) * beta * p.nu() * et));
    }
    append_generator_terms(
        p, x, [&](int y) { return signed_pow(a, y) * signed_pow(b, n - y); }, terms);
    return residual_of(terms);
}

Residual harmonicity_residual_fd(const ModelParams& p, double beta, int x, double t, double step)
{
    check_martingale_args(p, x, t);
    require(step > 0.0 && t - step >= 0.0, "finite-difference step must stay in t >= 0");
    std::vector<SignedLog> terms;
    double hp = exp_martingale_value(p, beta, x, t + step).value();
    double hm = exp_martingale_value(p, beta, x, t - step).value();
    terms.push_back(SignedLog::from_value((hp - hm) / (2.0 * step)));
    append_generator_terms(
        p, x, [&](int y) { return exp_martingale_value(p, beta, y, t); }, terms);
    return residual_of(terms);
}

double integrated_log_I(const ModelParams& p, double alpha, int x, double t)
{
    return coef_B(p, x, alpha).log_value - alpha * t;
}

double integrated_log_J(const ModelParams& p, double alpha, int x, double t)
{
    return coef_D(p, x, alpha).log_value - alpha * t;
}

double integrated_I(const ModelParams& p, double alpha, int x, double t)
{
    return std::exp(integrated_log_I(p, alpha, x, t));
}

double integrated_J(const ModelParams& p, double alpha, int x, double t)
{
    return std::exp(integrated_log_J(p, alpha, x, t));
}

double integrated_log_I_over_beta(const ModelParams& p, double alpha, int x, double t)
{
    return over_beta(p, alpha, x, t, 1.0, p.mu());
}

double integrated_log_J_over_beta(const ModelParams& p, double alpha, int x, double t)
{
    return over_beta(p, alpha, x, t, -1.0, p.nu());
}

double engset_log_K(const ModelParams& p, double alpha, int x, double t)
{
    auto b = coef_b(p, alpha);
    auto d = coef_d(p, alpha);
    double lk = log_add_exp(d.log_value + coef_B(p, x, alpha).log_value,
                            b.log_value + coef_D(p, x, alpha).log_value);
    return lk - alpha * t;
}

double engset_K_value(const ModelParams& p, double alpha, int x, double t)
{
    return std::exp(engset_log_K(p, alpha, x, t));
}

Residual integrated_residual(IntegratedKind kind, const ModelParams& p, double alpha, int x)
{
    require(p.valid_state(x), "state outside 0..C");
    require(alpha > 0.0, "alpha must be positive");
    std::function<double(int)> log_f;
    switch (kind) {
    case IntegratedKind::I:
        log_f = [&](int y) { return coef_B(p, y, alpha).log_value; };
        break;
    case IntegratedKind::J:
        log_f = [&](int y) { return coef_D(p, y, alpha).log_value; };
        break;
    case IntegratedKind::K: {
        double lb = coef_b(p, alpha).log_value;
        double ld = coef_d(p, alpha).log_value;
        log_f = [&p, alpha, lb, ld](int y) {
            return log_add_exp(ld + coef_B(p, y, alpha).log_value,
                               lb + coef_D(p, y, alpha).log_value);
        };
        break;
    }
    }
    std::vector<SignedLog> terms;
    terms.push_back(SignedLog::from_log(std::log(alpha) + log_f(x), -1));
    append_generator_terms(
        p, x, [&](int y) { return SignedLog::from_log(log_f(y)); }, terms);
    return residual_of(terms);
}

} // namespace engset
