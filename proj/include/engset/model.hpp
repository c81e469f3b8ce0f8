#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace engset {

enum class ProcessKind { Ehrenfest, Engset };

std::string_view to_string(ProcessKind kind);
ProcessKind parse_process_kind(std::string_view name);

/**
 * Parameters of an Ehrenfest or Engset process.
 *
 * N particles (sources), each switching 0 -> 1 at rate nu and 1 -> 0 at
 * rate mu. The Engset process forbids upward jumps out of the capacity C;
 * the Ehrenfest process is the case C = N.
 *
 * Rates are normalized on construction so that nu + mu == 1. The original
 * sum is kept as time_scale(): a model time t corresponds to t / time_scale()
 * in the caller's units.
 */
class ModelParams {
public:
    static ModelParams ehrenfest(int n, double nu, std::optional<double> mu = std::nullopt);
    static ModelParams engset(int n, int capacity, double nu,
                              std::optional<double> mu = std::nullopt);
    static ModelParams make(ProcessKind kind, int n, int capacity, double nu,
                            std::optional<double> mu = std::nullopt);

    ProcessKind kind() const { return kind_; }
    int n() const { return n_; }
    int capacity() const { return capacity_; }
    double nu() const { return nu_; }
    double mu() const { return mu_; }
    double time_scale() const { return time_scale_; }

    /// True when the capacity actually truncates the state space.
    bool reflected() const { return capacity_ < n_; }
    double eta() const { return static_cast<double>(capacity_) / n_; }
    int num_states() const { return capacity_ + 1; }

    double up_rate(int x) const;
    double down_rate(int x) const;
    bool valid_state(int x) const { return x >= 0 && x <= capacity_; }

    double to_model_time(double t) const { return t * time_scale_; }
    double to_input_time(double t) const { return t / time_scale_; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    ModelParams() = default;

    ProcessKind kind_ = ProcessKind::Ehrenfest;
    int n_ = 1;
    int capacity_ = 1;
    double nu_ = 0.5;
    double mu_ = 0.5;
    double time_scale_ = 1.0;
};

/// Birth and death rates of the generator, indexed by state 0..C.
struct RateTable {
    std::vector<double> up;
    std::vector<double> down;

    int size() const { return static_cast<int>(up.size()); }
    double diagonal(int x) const { return -(up[x] + down[x]); }

    /// (Q f)(x) for a function f on the state space.
    std::vector<double> apply(const std::vector<double>& f) const;
};

RateTable build_generator(const ModelParams& p);

/// log of the unnormalized stationary weight binom(N,x)(nu/mu)^x on 0..C.
std::vector<double> log_stationary_weights(const ModelParams& p);
std::vector<double> log_stationary_distribution(const ModelParams& p);
std::vector<double> stationary_distribution(const ModelParams& p);

/// min(eta, nu + (x0 - nu) e^{-t}); x0 is a fraction of N in [0, eta].
double fluid_limit(const ModelParams& p, double x0, double t);

enum class Regime { SubCritical, SuperCritical, Critical };

std::string_view to_string(Regime regime);

struct RegimeOptions {
    double x0 = 0.0;
    /// Critical when |C - nu N| <= band * sqrt(N).
    double band = 3.0;
};

struct RegimeReport {
    double eta = 0.0;
    double x0 = 0.0;
    double band = 0.0;
    Regime regime = Regime::Critical;
    std::optional<double> t_star;
    std::optional<double> entropy_h;
    /// Variance of the Gaussian limit of sqrt(N)(T_C - t*) for a start at 0.
    std::optional<double> limit_variance;
    std::optional<double> critical_delta;
    /// 1 - eta/nu, the large-N blocking probability.
    std::optional<double> blocking_limit;
    /// Limit of the stationary mass at C, 1 - mu eta / (nu (1-eta)).
    std::optional<double> boundary_mass_limit;
};

RegimeReport classify_regime(const ModelParams& p, const RegimeOptions& opts = {});

/// Relative entropy of Bernoulli(eta) with respect to Bernoulli(nu).
double bernoulli_entropy(double eta, double nu);

/// 1 - eta/nu; requires nu > eta.
double engset_blocking_limit(const ModelParams& p);

/**
 * Large-N limit of the stationary probability of the state C when nu > eta:
 * the empty-space count C - X is asymptotically M/M/1 with arrival rate
 * mu eta and service rate nu (1 - eta), so P(X = C) -> 1 - mu eta / (nu (1-eta)).
 */
double engset_boundary_mass_limit(const ModelParams& p);

} // namespace engset
