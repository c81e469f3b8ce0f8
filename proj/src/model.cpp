#include "engset/model.hpp"

#include <cmath>
#include <string>

#include "engset/error.hpp"
#include "engset/signed_log.hpp"

namespace engset {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::RegimeMismatch: return "regime_mismatch";
    case ErrorCode::QuadratureFailure: return "quadrature_failure";
    case ErrorCode::Censored: return "censored";
    case ErrorCode::SingularSystem: return "singular_system";
    }
    return "unknown";
}

std::string_view to_string(ProcessKind kind)
{
    return kind == ProcessKind::Ehrenfest ? "ehrenfest" : "engset";
}

ProcessKind parse_process_kind(std::string_view name)
{
    if (name == "ehrenfest") {
        return ProcessKind::Ehrenfest;
    }
    if (name == "engset") {
        return ProcessKind::Engset;
    }
    fail(ErrorCode::InvalidArgument, "unknown process kind '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::SubCritical: return "SubCritical";
    case Regime::SuperCritical: return "SuperCritical";
    case Regime::Critical: return "Critical";
    }
    return "unknown";
}

ModelParams ModelParams::make(ProcessKind kind, int n, int capacity, double nu,
                              std::optional<double> mu)
{
    require(n >= 1, "N must be a positive integer");
    require(capacity >= 1 && capacity <= n, "capacity must satisfy 1 <= C <= N");
    require(kind == ProcessKind::Engset || capacity == n,
            "the Ehrenfest process has capacity N");
    require(std::isfinite(nu) && nu > 0.0, "nu must be positive");

    double total = 1.0;
    if (mu) {
        require(std::isfinite(*mu) && *mu > 0.0, "mu must be positive");
        total = nu + *mu;
    } else {
        require(nu < 1.0, "nu must lie in (0,1) when mu is implied");
    }

    ModelParams p;
    p.kind_ = kind;
    p.n_ = n;
    p.capacity_ = capacity;
    p.nu_ = nu / total;
    p.mu_ = 1.0 - p.nu_;
    p.time_scale_ = total;
    require(p.nu_ > 0.0 && p.mu_ > 0.0, "normalized rates must be strictly positive");
    return p;
}

ModelParams ModelParams::ehrenfest(int n, double nu, std::optional<double> mu)
{
    return make(ProcessKind::Ehrenfest, n, n, nu, mu);
}

ModelParams ModelParams::engset(int n, int capacity, double nu, std::optional<double> mu)
{
    return make(ProcessKind::Engset, n, capacity, nu, mu);
}

double ModelParams::up_rate(int x) const
{
    return x < capacity_ ? nu_ * (n_ - x) : 0.0;
}

double ModelParams::down_rate(int x) const { return mu_ * x; }

std::vector<double> RateTable::apply(const std::vector<double>& f) const
{
    require(static_cast<int>(f.size()) == size(), "function size does not match state space");
    std::vector<double> out(f.size(), 0.0);
    for (int x = 0; x < size(); ++x) {
        double acc = 0.0;
        if (x + 1 < size()) {
            acc += up[x] * (f[x + 1] - f[x]);
        }
        if (x > 0) {
            acc += down[x] * (f[x - 1] - f[x]);
        }
        out[x] = acc;
    }
    return out;
}

RateTable build_generator(const ModelParams& p)
{
    RateTable q;
    q.up.resize(p.num_states());
    q.down.resize(p.num_states());
    for (int x = 0; x <= p.capacity(); ++x) {
        q.up[x] = p.up_rate(x);
        q.down[x] = p.down_rate(x);
    }
    return q;
}

std::vector<double> log_stationary_weights(const ModelParams& p)
{
    // Cumulative log-ratios of consecutive weights; no factorials.
    const double log_ratio = std::log(p.nu()) - std::log(p.mu());
    std::vector<double> w(p.num_states());
    w[0] = 0.0;
    for (int x = 0; x < p.capacity(); ++x) {
        w[x + 1] = w[x] + std::log(static_cast<double>(p.n() - x) / (x + 1)) + log_ratio;
    }
    return w;
}

std::vector<double> log_stationary_distribution(const ModelParams& p)
{
    auto w = log_stationary_weights(p);
    double z = log_sum_exp(w);
    for (double& v : w) {
        v -= z;
    }
    return w;
}

std::vector<double> stationary_distribution(const ModelParams& p)
{
    auto w = log_stationary_distribution(p);
    for (double& v : w) {
        v = std::exp(v);
    }
    return w;
}

double fluid_limit(const ModelParams& p, double x0, double t)
{
    const double eta = p.eta();
    require(x0 >= 0.0 && x0 <= eta, "start fraction x0 must lie in [0, eta]");
    require(t >= 0.0, "time must be nonnegative");
    return std::fmin(eta, p.nu() + (x0 - p.nu()) * std::exp(-t));
}

double bernoulli_entropy(double eta, double nu)
{
    auto term = [](double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); };
    return term(1.0 - eta, 1.0 - nu) + term(eta, nu);
}

RegimeReport classify_regime(const ModelParams& p, const RegimeOptions& opts)
{
    require(opts.band >= 0.0, "criticality band must be nonnegative");
    RegimeReport r;
    r.eta = p.eta();
    r.x0 = opts.x0;
    r.band = opts.band;
    require(opts.x0 >= 0.0 && opts.x0 <= r.eta, "start fraction x0 must lie in [0, eta]");

    const double nu = p.nu();
    const double n = p.n();
    const double excess = p.capacity() - nu * n;
    if (std::fabs(excess) <= opts.band * std::sqrt(n)) {
        r.regime = Regime::Critical;
        r.critical_delta = excess / std::sqrt(n);
    } else if (nu > r.eta) {
        r.regime = Regime::SuperCritical;
        r.t_star = std::log((nu - opts.x0) / (nu - r.eta));
        if (opts.x0 == 0.0) {
            r.limit_variance = r.eta * (1.0 - r.eta) / ((nu - r.eta) * (nu - r.eta));
        }
        r.blocking_limit = 1.0 - r.eta / nu;
        r.boundary_mass_limit = engset_boundary_mass_limit(p);
    } else {
        r.regime = Regime::SubCritical;
        r.entropy_h = bernoulli_entropy(r.eta, nu);
    }
    return r;
}

double engset_blocking_limit(const ModelParams& p)
{
    if (!(p.nu() > p.eta())) {
        fail(ErrorCode::RegimeMismatch, "the blocking limit 1 - eta/nu needs nu > eta");
    }
    return 1.0 - p.eta() / p.nu();
}

double engset_boundary_mass_limit(const ModelParams& p)
{
    if (!(p.nu() > p.eta())) {
        fail(ErrorCode::RegimeMismatch, "the boundary mass limit needs nu > eta");
    }
    return 1.0 - p.mu() * p.eta() / (p.nu() * (1.0 - p.eta()));
}

} // namespace engset
