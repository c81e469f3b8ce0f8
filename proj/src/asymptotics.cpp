#include "engset/asymptotics.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "engset/error.hpp"
#include "engset/laplace.hpp"
#include "engset/quadrature.hpp"
#include "engset/stats.hpp"

namespace engset {

namespace {

constexpr double kLog1e30 = 69.07755278982137;

void mismatch(const std::string& what) { fail(ErrorCode::RegimeMismatch, what); }

void require_band(const ModelParams& p, const RegimeOptions& opts, const char* law)
{
    const double excess = p.capacity() - p.nu() * p.n();
    if (std::fabs(excess) > opts.band * std::sqrt(static_cast<double>(p.n()))) {
        mismatch(std::string(law) + " needs |C - nu N| <= band sqrt(N)");
    }
}

double log_critical_denominator(double nu, double delta, double alpha)
{
    const double c1 = delta / nu;
    const double c2 = (1.0 - nu) / (2.0 * nu);
    const double peak = std::fmax(0.0, c1 / (2.0 * c2));
    double upper = peak + std::sqrt(kLog1e30 / c2);
    if (alpha > 1.0) {
        auto f = [&](double u) { return c1 * u - c2 * u * u + (alpha - 1.0) * std::log(u); };
        double ustar = (c1 + std::sqrt(c1 * c1 + 8.0 * c2 * (alpha - 1.0))) / (4.0 * c2);
        while (f(upper) > f(ustar) - kLog1e30) {
            upper *= 2.0;
        }
    }
    return integrate_singular_kernel(gauss_profile(c1, c2, upper), alpha).log_value;
}

double critical_shift(double nu) { return 0.5 * std::log(nu / (1.0 - nu)); }

Scaling make_scaling(double log_scale, double shift, int from, int to)
{
    return {log_scale, shift, from, to};
}

} // namespace

std::string_view to_string(LawKind kind)
{
    switch (kind) {
    case LawKind::SuperCriticalNormal: return "SuperCriticalNormal";
    case LawKind::SubCritFullExp: return "SubCritFullExp";
    case LawKind::SubCritEntropyExp: return "SubCritEntropyExp";
    case LawKind::SubCritEmptyExp: return "SubCritEmptyExp";
    case LawKind::CriticalSaturation: return "CriticalSaturation";
    case LawKind::CriticalEmptyExp: return "CriticalEmptyExp";
    }
    return "unknown";
}

LawKind parse_law_kind(std::string_view name)
{
    for (LawKind k : {LawKind::SuperCriticalNormal, LawKind::SubCritFullExp,
                      LawKind::SubCritEntropyExp, LawKind::SubCritEmptyExp,
                      LawKind::CriticalSaturation, LawKind::CriticalEmptyExp}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown law '" + std::string(name) + "'");
}

LimitLaw LimitLaw::normal(double variance)
{
    require(variance > 0.0 && std::isfinite(variance), "variance must be positive");
    LimitLaw l;
    l.kind_ = LawKind::SuperCriticalNormal;
    l.variance_ = variance;
    return l;
}

LimitLaw LimitLaw::exponential(LawKind kind, double rate)
{
    require(kind != LawKind::SuperCriticalNormal && kind != LawKind::CriticalSaturation,
            "not an exponential law");
    require(rate > 0.0 && std::isfinite(rate), "rate must be positive");
    LimitLaw l;
    l.kind_ = kind;
    l.rate_ = rate;
    return l;
}

LimitLaw LimitLaw::critical(double nu, double delta)
{
    require(nu > 0.0 && nu < 1.0, "nu must lie in (0,1)");
    require(std::isfinite(delta), "delta must be finite");
    LimitLaw l;
    l.kind_ = LawKind::CriticalSaturation;
    l.nu_ = nu;
    l.delta_ = delta;
    return l;
}

double LimitLaw::log_lt(double alpha) const
{
    require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be finite and nonnegative");
    switch (kind_) {
    case LawKind::SuperCriticalNormal:
        return variance_ * alpha * alpha / 2.0;
    case LawKind::CriticalSaturation:
        if (alpha == 0.0) {
            return 0.0;
        }
        return std::lgamma(alpha) - log_critical_denominator(nu_, delta_, alpha);
    default:
        return std::log(rate_) - std::log(rate_ + alpha);
    }
}

double LimitLaw::lt(double alpha) const { return std::exp(log_lt(alpha)); }

bool LimitLaw::has_cdf() const { return kind_ != LawKind::CriticalSaturation || delta_ == 0.0; }

double LimitLaw::cdf(double x) const
{
    switch (kind_) {
    case LawKind::SuperCriticalNormal:
        return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance_));
    case LawKind::CriticalSaturation:
        require(delta_ == 0.0, "the critical law has a closed-form cdf only for delta = 0");
        return std::erfc(std::exp(-(x - critical_shift(nu_))) / std::numbers::sqrt2);
    default:
        return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x);
    }
}

std::optional<double> LimitLaw::log_density(double x) const
{
    switch (kind_) {
    case LawKind::SuperCriticalNormal:
        return -x * x / (2.0 * variance_) - 0.5 * std::log(2.0 * std::numbers::pi * variance_);
    case LawKind::CriticalSaturation: {
        if (delta_ != 0.0) {
            return std::nullopt;
        }
        double y = x - critical_shift(nu_);
        return 0.5 * std::log(2.0 / std::numbers::pi) - y - 0.5 * std::exp(-2.0 * y);
    }
    default:
        if (x < 0.0) {
            return -INFINITY;
        }
        return std::log(rate_) - rate_ * x;
    }
}

double LimitLaw::mean() const
{
    switch (kind_) {
    case LawKind::SuperCriticalNormal:
        return 0.0;
    case LawKind::CriticalSaturation:
        require(delta_ == 0.0, "the critical law mean is available only for delta = 0");
        // E[-log |N(0,1)|] = (gamma + log 2) / 2.
        return critical_shift(nu_) + 0.5 * (std::numbers::egamma + std::numbers::ln2);
    default:
        return 1.0 / rate_;
    }
}

LimitLaw LimitLaw::with_scaling(Scaling s) const
{
    LimitLaw l = *this;
    l.scaling_ = s;
    return l;
}

LimitLaw supercritical_law(const ModelParams& p)
{
    const double nu = p.nu();
    const double eta = p.eta();
    if (!(nu > eta)) {
        mismatch("the super-critical law needs nu > eta");
    }
    double var = eta * (1.0 - eta) / ((nu - eta) * (nu - eta));
    return LimitLaw::normal(var).with_scaling(make_scaling(
        0.5 * std::log(static_cast<double>(p.n())), std::log(nu / (nu - eta)), 0, p.capacity()));
}

LimitLaw subcritical_full_law(const ModelParams& p)
{
    if (p.reflected()) {
        mismatch("the full-saturation law needs C = N");
    }
    const int n = p.n();
    return LimitLaw::exponential(LawKind::SubCritFullExp, p.mu())
        .with_scaling(make_scaling(std::log(static_cast<double>(n)) + n * std::log(p.nu()), 0.0, 0, n));
}

LimitLaw subcritical_entropy_law(const ModelParams& p)
{
    const double nu = p.nu();
    const double eta = p.eta();
    if (!(nu < eta && eta < 1.0)) {
        mismatch("the entropy law needs nu < eta < 1");
    }
    const double h = bernoulli_entropy(eta, nu);
    const double tail = 0.5 * std::log(static_cast<double>(p.n())) - p.n() * h;
    const double log2pi = std::log(2.0 * std::numbers::pi);
    LimitLaw l = LimitLaw::exponential(LawKind::SubCritEntropyExp, 1.0);
    l.scaling_ = make_scaling(
        std::log(eta - nu) - 0.5 * (log2pi + std::log(eta * (1.0 - eta))) + tail, 0.0, 0,
        p.capacity());
    l.alt_log_scale_ = 0.5 * std::log(eta * (1.0 - eta)) - std::log(eta - nu) - 0.5 * log2pi + tail;
    l.entropy_h_ = h;
    return l;
}

LimitLaw subcritical_empty_law(const ModelParams& p)
{
    if (!(p.nu() < p.eta())) {
        mismatch("the empty-state law needs nu < eta");
    }
    const int n = p.n();
    return LimitLaw::exponential(LawKind::SubCritEmptyExp, p.nu())
        .with_scaling(make_scaling(std::log(static_cast<double>(n)) + n * std::log(p.mu()), 0.0,
                                   p.capacity(), 0));
}

LimitLaw critical_saturation_law(const ModelParams& p, const RegimeOptions& opts)
{
    require_band(p, opts, "the critical saturation law");
    const double n = p.n();
    const double delta = (p.capacity() - p.nu() * n) / std::sqrt(n);
    return LimitLaw::critical(p.nu(), delta)
        .with_scaling(make_scaling(0.0, 0.5 * std::log(n), 0, p.capacity()));
}

LimitLaw critical_empty_law(const ModelParams& p, const RegimeOptions& opts)
{
    require_band(p, opts, "the critical empty-state law");
    const int n = p.n();
    return LimitLaw::exponential(LawKind::CriticalEmptyExp, 2.0 * p.nu())
        .with_scaling(make_scaling(std::log(static_cast<double>(n)) + n * std::log(p.mu()), 0.0,
                                   p.capacity(), 0));
}

LimitLaw make_law(LawKind kind, const ModelParams& p, const RegimeOptions& opts)
{
    switch (kind) {
    case LawKind::SuperCriticalNormal: return supercritical_law(p);
    case LawKind::SubCritFullExp: return subcritical_full_law(p);
    case LawKind::SubCritEntropyExp: return subcritical_entropy_law(p);
    case LawKind::SubCritEmptyExp: return subcritical_empty_law(p);
    case LawKind::CriticalSaturation: return critical_saturation_law(p, opts);
    case LawKind::CriticalEmptyExp: return critical_empty_law(p, opts);
    }
    fail(ErrorCode::InvalidArgument, "unknown law");
}

double critical_lt_closed_form(double nu, double alpha)
{
    require(nu > 0.0 && nu < 1.0 && alpha > 0.0, "need nu in (0,1) and alpha > 0");
    double l = 0.5 * alpha * (std::log((1.0 - nu) / nu) + std::numbers::ln2)
               + std::lgamma(0.5 * (alpha + 1.0)) - 0.5 * std::log(std::numbers::pi);
    return std::exp(l);
}

double finite_n_scaled_lt(const LimitLaw& law, const ModelParams& p, double alpha)
{
    require(law.scaling().has_value(), "law carries no finite-N scaling");
    require(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
    const Scaling& s = *law.scaling();
    const double a = alpha * std::exp(s.log_scale);
    LaplaceQuery q{p, s.from, s.to, a * p.time_scale()};
    return std::exp(a * s.shift + hitting_transform(q).log_lt);
}

ModelParams scenario_params(const Scenario& s, int n)
{
    require(n >= 1, "N must be positive");
    int c = n;
    switch (s.law) {
    case LawKind::SubCritFullExp:
        return ModelParams::ehrenfest(n, s.nu);
    case LawKind::CriticalSaturation:
    case LawKind::CriticalEmptyExp:
        c = static_cast<int>(std::lround(s.nu * n + s.delta * std::sqrt(static_cast<double>(n))));
        break;
    default:
        c = static_cast<int>(std::lround(s.eta * n));
        break;
    }
    require(c >= 1 && c <= n, "scenario capacity falls outside 1..N");
    if (c == n) {
        return ModelParams::ehrenfest(n, s.nu);
    }
    return ModelParams::make(s.process, n, c, s.nu);
}

std::vector<ConvergencePoint> convergence_study(const Scenario& s, const std::vector<int>& ns,
                                                const std::vector<double>& alphas, int threads)
{
    require(!ns.empty() && !alphas.empty(), "need at least one N and one alpha");
    const RegimeOptions opts{0.0, std::fmax(RegimeOptions{}.band, std::fabs(s.delta) + 1.0)};
    std::vector<std::vector<ConvergencePoint>> rows(ns.size());
    std::vector<std::exception_ptr> errors(ns.size());
    auto work = [&](std::size_t i) {
        try {
            ModelParams p = scenario_params(s, ns[i]);
            LimitLaw law = make_law(s.law, p, opts);
            for (double a : alphas) {
                ConvergencePoint pt;
                pt.n = ns[i];
                pt.alpha = a;
                pt.exact_lt = finite_n_scaled_lt(law, p, a);
                pt.limit_lt = law.lt(a);
                pt.gap = std::fabs(pt.exact_lt - pt.limit_lt);
                rows[i].push_back(pt);
            }
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    t = std::max(1u, std::min<unsigned>(t, ns.size()));
    if (t == 1) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            work(i);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < t; ++k) {
            pool.emplace_back([&, k] {
                for (std::size_t i = k; i < ns.size(); i += t) {
                    work(i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    std::vector<ConvergencePoint> out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.insert(out.end(), rows[i].begin(), rows[i].end());
    }
    return out;
}

double ks_distance(const HittingSampleSet& samples, const LimitLaw& law, const ModelParams& p)
{
    if (samples.censored_count > 0 || samples.horizon_censored_count > 0) {
        fail(ErrorCode::Censored, "KS distance needs an uncensored sample");
    }
    require(law.has_cdf(), "law has no closed-form cdf");
    require(law.scaling().has_value(), "law carries no finite-N scaling");
    const Scaling& s = *law.scaling();
    const double scale = std::exp(s.log_scale);
    std::vector<double> y;
    y.reserve(samples.times.size());
    for (double t : samples.times) {
        y.push_back((p.to_model_time(t) - s.shift) * scale);
    }
    return ks_statistic(y, [&](double x) { return law.cdf(x); });
}

} // namespace engset
