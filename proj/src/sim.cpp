#include "engset/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <thread>

#include "engset/error.hpp"

namespace engset {

namespace {

class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t index)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on (0,1), never 0 or 1.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

int resolve_threads(int requested, long n_paths)
{
    long t = requested > 0 ? requested : static_cast<long>(std::thread::hardware_concurrency());
    t = std::max(1L, std::min(t, n_paths));
    return static_cast<int>(t);
}

/// Calls body(i) for i in [0, n) on a static partition across threads.
template <class Body>
void for_each_path(long n, int threads, Body body)
{
    const int t = resolve_threads(threads, n);
    if (t == 1) {
        for (long i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) {
        long lo = n * k / t;
        long hi = n * (k + 1) / t;
        pool.emplace_back([&, lo, hi, k] {
            try {
                for (long i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

enum class Outcome : unsigned char { Hit, EventCap, Horizon };

struct PathRecord {
    double time = 0.0;
    Outcome outcome = Outcome::Hit;
};

double model_horizon(const ModelParams& p, double horizon)
{
    return std::isinf(horizon) ? horizon : p.to_model_time(horizon);
}

PathRecord run_hitting_path(const SimConfig& c, const HitState& rule, long index)
{
    const ModelParams& p = c.params;
    const double horizon = model_horizon(p, rule.horizon);
    PathRng rng(c.master_seed, static_cast<std::uint64_t>(index));
    int x = c.start_state;
    double t = 0.0;
    if (x == rule.target) {
        return {0.0, Outcome::Hit};
    }
    for (long events = 0; events < c.max_events_per_path; ++events) {
        double up = p.up_rate(x);
        double down = p.down_rate(x);
        double total = up + down;
        t += rng.exponential(total);
        if (t > horizon) {
            return {horizon, Outcome::Horizon};
        }
        x += rng.uniform() * total < up ? 1 : -1;
        if (x == rule.target) {
            return {t, Outcome::Hit};
        }
    }
    return {t, Outcome::EventCap};
}

PathRecord run_particle_path(const SimConfig& c, const HitState& rule, long index)
{
    const ModelParams& p = c.params;
    const double horizon = model_horizon(p, rule.horizon);
    PathRng rng(c.master_seed, static_cast<std::uint64_t>(index));
    const int n = p.n();
    std::vector<unsigned char> on(n, 0);
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) {
        on[i] = i < c.start_state ? 1 : 0;
        next[i] = rng.exponential(on[i] ? p.mu() : p.nu());
    }
    int x = c.start_state;
    if (x == rule.target) {
        return {0.0, Outcome::Hit};
    }
    for (long events = 0; events < c.max_events_per_path; ++events) {
        int i = static_cast<int>(std::min_element(next.begin(), next.end()) - next.begin());
        double t = next[i];
        if (t > horizon) {
            return {horizon, Outcome::Horizon};
        }
        on[i] ^= 1;
        x += on[i] ? 1 : -1;
        next[i] = t + rng.exponential(on[i] ? p.mu() : p.nu());
        if (x == rule.target) {
            return {t, Outcome::Hit};
        }
    }
    return {0.0, Outcome::EventCap};
}

HittingSampleSet collect(const SimConfig& c, const std::vector<PathRecord>& rec, double horizon)
{
    HittingSampleSet out;
    out.horizon = horizon;
    out.config_digest = config_digest(c);
    for (const auto& r : rec) {
        switch (r.outcome) {
        case Outcome::Hit: out.times.push_back(c.params.to_input_time(r.time)); break;
        case Outcome::EventCap: ++out.censored_count; break;
        case Outcome::Horizon: ++out.horizon_censored_count; break;
        }
    }
    return out;
}

void append(std::string& s, const char* key, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.17g;", key, v);
    s += buf;
}

} // namespace

void validate(const SimConfig& c)
{
    const ModelParams& p = c.params;
    require(p.valid_state(c.start_state), "start state outside 0..C");
    require(c.n_paths > 0, "n_paths must be positive");
    require(c.max_events_per_path > 0, "max_events_per_path must be positive");
    require(c.threads >= 0, "threads must be nonnegative");
    if (const auto* h = std::get_if<HitState>(&c.stop_rule)) {
        require(p.valid_state(h->target), "target state outside 0..C");
        require(h->horizon > 0.0, "horizon must be positive");
    } else {
        double t = std::get<TimeHorizon>(c.stop_rule).t_max;
        require(t >= 0.0 && std::isfinite(t), "t_max must be finite and nonnegative");
    }
}

std::string config_digest(const SimConfig& c)
{
    const ModelParams& p = c.params;
    std::string s(to_string(p.kind()));
    s += ';';
    append(s, "n", p.n());
    append(s, "c", p.capacity());
    append(s, "nu", p.nu());
    append(s, "mu", p.mu());
    append(s, "scale", p.time_scale());
    append(s, "start", c.start_state);
    if (const auto* h = std::get_if<HitState>(&c.stop_rule)) {
        append(s, "hit", h->target);
        append(s, "horizon", h->horizon);
    } else {
        append(s, "t_max", std::get<TimeHorizon>(c.stop_rule).t_max);
    }
    s += "paths=" + std::to_string(c.n_paths) + ";seed=" + std::to_string(c.master_seed)
         + ";cap=" + std::to_string(c.max_events_per_path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

HittingSampleSet simulate_hitting(const SimConfig& c)
{
    validate(c);
    const auto* rule = std::get_if<HitState>(&c.stop_rule);
    require(rule != nullptr, "hitting simulation needs a HitState stop rule");
    std::vector<PathRecord> rec(c.n_paths);
    for_each_path(c.n_paths, c.threads, [&](long i) { rec[i] = run_hitting_path(c, *rule, i); });
    return collect(c, rec, rule->horizon);
}

HittingSampleSet simulate_hitting_particles(const SimConfig& c)
{
    validate(c);
    require(!c.params.reflected(), "the particle construction only covers the Ehrenfest process");
    const auto* rule = std::get_if<HitState>(&c.stop_rule);
    require(rule != nullptr, "hitting simulation needs a HitState stop rule");
    std::vector<PathRecord> rec(c.n_paths);
    for_each_path(c.n_paths, c.threads, [&](long i) { rec[i] = run_particle_path(c, *rule, i); });
    return collect(c, rec, rule->horizon);
}

TerminalSampleSet simulate_terminal(const SimConfig& c)
{
    validate(c);
    const auto* rule = std::get_if<TimeHorizon>(&c.stop_rule);
    require(rule != nullptr, "terminal-state simulation needs a TimeHorizon stop rule");
    const ModelParams& p = c.params;
    const double t_max = p.to_model_time(rule->t_max);
    std::vector<int> states(c.n_paths);
    std::vector<unsigned char> capped(c.n_paths, 0);
    for_each_path(c.n_paths, c.threads, [&](long i) {
        PathRng rng(c.master_seed, static_cast<std::uint64_t>(i));
        int x = c.start_state;
        double t = 0.0;
        long events = 0;
        while (true) {
            double up = p.up_rate(x);
            double down = p.down_rate(x);
            t += rng.exponential(up + down);
            if (t > t_max) {
                break;
            }
            if (++events > c.max_events_per_path) {
                capped[i] = 1;
                break;
            }
            x += rng.uniform() * (up + down) < up ? 1 : -1;
        }
        states[i] = x;
    });
    TerminalSampleSet out;
    out.config_digest = config_digest(c);
    for (long i = 0; i < c.n_paths; ++i) {
        if (capped[i]) {
            ++out.censored_count;
        } else {
            out.states.push_back(states[i]);
        }
    }
    return out;
}

SimulationOutput simulate_paths(const SimConfig& c)
{
    if (std::holds_alternative<HitState>(c.stop_rule)) {
        return simulate_hitting(c);
    }
    return simulate_terminal(c);
}

EmpiricalLt empirical_lt(const HittingSampleSet& s, double alpha)
{
    require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be finite and nonnegative");
    if (s.censored_count > 0) {
        fail(ErrorCode::Censored, std::to_string(s.censored_count)
                                      + " paths hit the event cap; refusing a biased transform");
    }
    const long n = static_cast<long>(s.times.size()) + s.horizon_censored_count;
    require(n > 0, "empty sample set");
    if (alpha == 0.0) {
        return {1.0, 0.0, 0.0};
    }
    double sum = 0.0;
    for (double t : s.times) {
        sum += std::exp(-alpha * t);
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double t : s.times) {
        double d = std::exp(-alpha * t) - mean;
        ss += d * d;
    }
    ss += s.horizon_censored_count * mean * mean;
    EmpiricalLt out;
    out.estimate = mean;
    out.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    if (s.horizon_censored_count > 0) {
        out.truncation_bound =
            static_cast<double>(s.horizon_censored_count) / n * std::exp(-alpha * s.horizon);
        if (out.truncation_bound > 1e-3 * out.std_error) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "%ld paths outlived the horizon; truncation bias bound %.3g exceeds "
                          "1e-3 standard errors",
                          s.horizon_censored_count, out.truncation_bound);
            fail(ErrorCode::Censored, buf);
        }
    }
    return out;
}

double fluid_deviation(const SimConfig& c, int grid_points)
{
    validate(c);
    const auto* rule = std::get_if<TimeHorizon>(&c.stop_rule);
    require(rule != nullptr, "fluid deviation needs a TimeHorizon stop rule");
    require(grid_points >= 2, "need at least two grid points");
    const ModelParams& p = c.params;
    const double x0 = static_cast<double>(c.start_state) / p.n();
    const double t_max = p.to_model_time(rule->t_max);
    std::vector<double> grid(grid_points);
    std::vector<double> fluid(grid_points);
    for (int k = 0; k < grid_points; ++k) {
        grid[k] = t_max * k / (grid_points - 1);
        fluid[k] = fluid_limit(p, x0, grid[k]);
    }
    std::vector<double> dev(c.n_paths, 0.0);
    std::vector<unsigned char> capped(c.n_paths, 0);
    for_each_path(c.n_paths, c.threads, [&](long i) {
        PathRng rng(c.master_seed, static_cast<std::uint64_t>(i));
        int x = c.start_state;
        double t = 0.0;
        int k = 0;
        double worst = 0.0;
        long events = 0;
        while (k < grid_points) {
            double up = p.up_rate(x);
            double down = p.down_rate(x);
            double next = t + rng.exponential(up + down);
            while (k < grid_points && grid[k] < next) {
                worst = std::fmax(worst, std::fabs(static_cast<double>(x) / p.n() - fluid[k]));
                ++k;
            }
            if (k == grid_points) {
                break;
            }
            if (++events > c.max_events_per_path) {
                capped[i] = 1;
                break;
            }
            t = next;
            x += rng.uniform() * (up + down) < up ? 1 : -1;
        }
        dev[i] = worst;
    });
    double sum = 0.0;
    for (long i = 0; i < c.n_paths; ++i) {
        if (capped[i]) {
            fail(ErrorCode::Censored, "a path exhausted the event cap before t_max");
        }
        sum += dev[i];
    }
    return sum / c.n_paths;
}

StoppedSample simulate_stopped(const SimConfig& c, double t_obs)
{
    validate(c);
    const auto* rule = std::get_if<HitState>(&c.stop_rule);
    require(rule != nullptr, "stopped sampling needs a HitState stop rule");
    require(t_obs >= 0.0, "observation time must be nonnegative");
    const ModelParams& p = c.params;
    const double t_end = p.to_model_time(t_obs);
    StoppedSample out;
    out.stop_times.resize(c.n_paths);
    out.states.resize(c.n_paths);
    std::vector<unsigned char> capped(c.n_paths, 0);
    for_each_path(c.n_paths, c.threads, [&](long i) {
        PathRng rng(c.master_seed, static_cast<std::uint64_t>(i));
        int x = c.start_state;
        double t = 0.0;
        long events = 0;
        while (x != rule->target) {
            double up = p.up_rate(x);
            double down = p.down_rate(x);
            double next = t + rng.exponential(up + down);
            if (next > t_end) {
                t = t_end;
                break;
            }
            if (++events > c.max_events_per_path) {
                capped[i] = 1;
                break;
            }
            t = next;
            x += rng.uniform() * (up + down) < up ? 1 : -1;
        }
        out.stop_times[i] = p.to_input_time(t);
        out.states[i] = x;
    });
    if (std::any_of(capped.begin(), capped.end(), [](unsigned char v) { return v != 0; })) {
        fail(ErrorCode::Censored, "a path exhausted the event cap before the observation time");
    }
    return out;
}

} // namespace engset
