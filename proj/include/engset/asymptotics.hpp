#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "engset/model.hpp"
#include "engset/sim.hpp"

namespace engset {

enum class LawKind {
    SuperCriticalNormal,
    SubCritFullExp,
    SubCritEntropyExp,
    SubCritEmptyExp,
    CriticalSaturation,
    CriticalEmptyExp,
};

std::string_view to_string(LawKind kind);
LawKind parse_law_kind(std::string_view name);

/**
 * How a finite-N hitting time is mapped onto a limit law:
 * S = (T - shift) * exp(log_scale), T in model time, for the hit
 * from -> to.
 */
struct Scaling {
    double log_scale = 0.0;
    double shift = 0.0;
    int from = 0;
    int to = 0;
};

/**
 * One of the limiting distributions: a centred normal, an exponential, or
 * the critical saturation law with Laplace transform
 *   Gamma(a) / \int_0^inf exp(u delta/nu - u^2 (1-nu)/(2 nu)) u^{a-1} du.
 */
class LimitLaw {
public:
    static LimitLaw normal(double variance);
    static LimitLaw exponential(LawKind kind, double rate);
    static LimitLaw critical(double nu, double delta);

    LawKind kind() const { return kind_; }
    double rate() const { return rate_; }
    double variance() const { return variance_; }
    double nu() const { return nu_; }
    double delta() const { return delta_; }

    double lt(double alpha) const;
    double log_lt(double alpha) const;

    /// The critical law has a closed-form cdf and density only for delta = 0.
    bool has_cdf() const;
    double cdf(double x) const;
    std::optional<double> log_density(double x) const;
    double mean() const;

    const std::optional<Scaling>& scaling() const { return scaling_; }
    LimitLaw with_scaling(Scaling s) const;

    /// Entropy law only: the log of the alternative prefactor
    /// sqrt(eta(1-eta)) / ((eta-nu) sqrt(2 pi)) sqrt(N) e^{-NH}.
    std::optional<double> alternative_log_scale() const { return alt_log_scale_; }
    std::optional<double> entropy_h() const { return entropy_h_; }

private:
    friend LimitLaw subcritical_entropy_law(const ModelParams& p);

    LawKind kind_ = LawKind::SubCritFullExp;
    double rate_ = 1.0;
    double variance_ = 1.0;
    double nu_ = 0.5;
    double delta_ = 0.0;
    std::optional<Scaling> scaling_;
    std::optional<double> alt_log_scale_;
    std::optional<double> entropy_h_;
};

/// sqrt(N)(T_C - t*) from 0 -> N(0, eta(1-eta)/(nu-eta)^2); needs nu > eta.
LimitLaw supercritical_law(const ModelParams& p);
/// N nu^N T_N from 0 -> Exp(1 - nu); needs C = N.
LimitLaw subcritical_full_law(const ModelParams& p);
/**
 * kappa_N T_C from 0 -> Exp(1) with
 * kappa_N = (eta - nu) / sqrt(2 pi eta (1-eta)) sqrt(N) e^{-N H}; needs
 * nu < eta < 1.
 */
LimitLaw subcritical_entropy_law(const ModelParams& p);
/// N (1-nu)^N T_0 from C -> Exp(nu); needs nu < eta.
LimitLaw subcritical_empty_law(const ModelParams& p);
/// T_C - log(N)/2 from 0 in the critical band.
LimitLaw critical_saturation_law(const ModelParams& p, const RegimeOptions& opts = {});
/// N (1-nu)^N T_0 from C -> Exp(2 nu) in the critical band.
LimitLaw critical_empty_law(const ModelParams& p, const RegimeOptions& opts = {});

LimitLaw make_law(LawKind kind, const ModelParams& p, const RegimeOptions& opts = {});

/// Closed form of the delta = 0 critical transform after duplication:
/// ((1-nu)/nu)^{a/2} 2^{a/2} Gamma((a+1)/2) / sqrt(pi).
double critical_lt_closed_form(double nu, double alpha);

/// Exact E[exp(-alpha S)] for the law's scaled variable at finite N.
double finite_n_scaled_lt(const LimitLaw& law, const ModelParams& p, double alpha);

/// Parameter family indexed by N used for convergence studies.
struct Scenario {
    LawKind law = LawKind::SubCritFullExp;
    ProcessKind process = ProcessKind::Ehrenfest;
    double nu = 0.5;
    /// Capacity fraction; C = round(eta N) (ignored for SubCritFullExp).
    double eta = 1.0;
    /// Critical laws: C = round(nu N + delta sqrt(N)).
    double delta = 0.0;
};

ModelParams scenario_params(const Scenario& s, int n);

struct ConvergencePoint {
    int n = 0;
    double alpha = 0.0;
    double exact_lt = 0.0;
    double limit_lt = 0.0;
    double gap = 0.0;
};

/// Rows ordered by N then alpha; N values are evaluated concurrently.
std::vector<ConvergencePoint> convergence_study(const Scenario& s, const std::vector<int>& ns,
                                                const std::vector<double>& alphas,
                                                int threads = 0);

/// KS distance of (t - shift) * scale against the law's cdf; samples in
/// caller units are first converted to model time with p.
double ks_distance(const HittingSampleSet& samples, const LimitLaw& law, const ModelParams& p);

} // namespace engset
