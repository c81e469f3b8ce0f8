#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "engset/model.hpp"

namespace engset {

// Times in this header (hitting times, horizons, t_max) are in the caller's
// units, i.e. model time divided by ModelParams::time_scale().

/**
 * Stop at the first visit to target. Paths still running at `horizon` are
 * stopped and counted as horizon-censored; they are legal inputs for Laplace
 * transforms as long as e^{-alpha horizon} is negligible.
 */
struct HitState {
    int target = 0;
    double horizon = std::numeric_limits<double>::infinity();
};

/// Run every path to t_max and keep the terminal state.
struct TimeHorizon {
    double t_max = 1.0;
};

using StopRule = std::variant<HitState, TimeHorizon>;

struct SimConfig {
    ModelParams params = ModelParams::ehrenfest(1, 0.5);
    int start_state = 0;
    StopRule stop_rule = HitState{};
    long n_paths = 1000;
    std::uint64_t master_seed = 0;
    long max_events_per_path = 1000000000L;
    /// 0 means hardware concurrency. Never changes the output.
    int threads = 0;
};

void validate(const SimConfig& c);

/// FNV-1a digest of every field that influences the output (not threads).
std::string config_digest(const SimConfig& c);

struct HittingSampleSet {
    /// Hitting times of the uncensored paths, in path-index order.
    std::vector<double> times;
    /// Paths that exhausted the event cap.
    long censored_count = 0;
    /// Paths still running at the horizon.
    long horizon_censored_count = 0;
    double horizon = std::numeric_limits<double>::infinity();
    std::string config_digest;

    long total_paths() const
    {
        return static_cast<long>(times.size()) + censored_count + horizon_censored_count;
    }
};

struct TerminalSampleSet {
    std::vector<int> states;
    long censored_count = 0;
    std::string config_digest;
};

using SimulationOutput = std::variant<HittingSampleSet, TerminalSampleSet>;

SimulationOutput simulate_paths(const SimConfig& c);
HittingSampleSet simulate_hitting(const SimConfig& c);
TerminalSampleSet simulate_terminal(const SimConfig& c);

/**
 * Ehrenfest hitting times built from N independent two-state particles
 * instead of the birth-death jump chain. Same config contract.
 */
HittingSampleSet simulate_hitting_particles(const SimConfig& c);

struct EmpiricalLt {
    double estimate = 1.0;
    double std_error = 0.0;
    /// Upper bound on the bias from horizon-censored paths, which are
    /// counted as contributing 0.
    double truncation_bound = 0.0;
};

/**
 * Sample mean of e^{-alpha T}. Event-cap censoring is refused (Censored);
 * horizon censoring is accepted only while its bias bound stays below
 * 1e-3 standard errors.
 */
EmpiricalLt empirical_lt(const HittingSampleSet& s, double alpha);

/**
 * Mean over paths of max_k |X(t_k)/N - fluid_limit(t_k)| on an even grid of
 * grid_points times in [0, t_max]. Requires a TimeHorizon rule and a start
 * fraction within [0, eta].
 */
double fluid_deviation(const SimConfig& c, int grid_points = 200);

/// Paths stopped at the target and observed at a fixed time t.
struct StoppedSample {
    /// min(t, T) for each path, in caller units.
    std::vector<double> stop_times;
    /// State at min(t, T).
    std::vector<int> states;
};

/// State at time t of each path stopped on hitting `target` (HitState rule).
StoppedSample simulate_stopped(const SimConfig& c, double t);

} // namespace engset
