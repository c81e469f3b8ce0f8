#include "engset/sample_io.hpp"

#include <cmath>
#include <cstdio>
#include <variant>

#include "engset/stats.hpp"

namespace engset {

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json params_to_json(const ModelParams& p)
{
    return {
        {"process", std::string(to_string(p.kind()))},
        {"n", p.n()},
        {"c", p.capacity()},
        {"nu", p.nu()},
        {"mu", p.mu()},
        {"time_scale", p.time_scale()},
        {"nu_input", p.nu() * p.time_scale()},
        {"mu_input", p.mu() * p.time_scale()},
    };
}

nlohmann::json sim_config_to_json(const SimConfig& c)
{
    nlohmann::json j = params_to_json(c.params);
    j["from"] = c.start_state;
    if (const auto* h = std::get_if<HitState>(&c.stop_rule)) {
        j["stop_rule"] = "hit";
        j["hit"] = h->target;
        if (std::isfinite(h->horizon)) {
            j["horizon"] = h->horizon;
        } else {
            j["horizon"] = nullptr;
        }
    } else {
        j["stop_rule"] = "time_horizon";
        j["t_max"] = std::get<TimeHorizon>(c.stop_rule).t_max;
    }
    j["paths"] = c.n_paths;
    j["seed"] = c.master_seed;
    j["max_events"] = c.max_events_per_path;
    j["config_digest"] = config_digest(c);
    return j;
}

nlohmann::json sample_summary_json(const SimulationOutput& out)
{
    nlohmann::json j;
    if (const auto* h = std::get_if<HittingSampleSet>(&out)) {
        auto s = summarize(h->times);
        j["kind"] = "hitting_times";
        j["count"] = s.count;
        j["censored"] = h->censored_count;
        j["horizon_censored"] = h->horizon_censored_count;
        j["mean"] = s.mean;
        j["variance"] = s.variance;
        j["std_error"] = s.std_error;
        j["min"] = s.min;
        j["max"] = s.max;
    } else {
        const auto& t = std::get<TerminalSampleSet>(out);
        std::vector<double> v(t.states.begin(), t.states.end());
        auto s = summarize(v);
        j["kind"] = "terminal_states";
        j["count"] = s.count;
        j["censored"] = t.censored_count;
        j["mean"] = s.mean;
        j["variance"] = s.variance;
        j["std_error"] = s.std_error;
    }
    return j;
}

void write_samples_csv(std::ostream& os, const SimConfig& c, const SimulationOutput& out)
{
    os << "# schema_version=" << kSchemaVersion << " config_digest=" << config_digest(c) << '\n';
    os << "# params=" << sim_config_to_json(c).dump() << '\n';
    if (const auto* h = std::get_if<HittingSampleSet>(&out)) {
        os << "# censored=" << h->censored_count << " horizon_censored=" << h->horizon_censored_count
           << '\n';
        os << "time\n";
        for (double t : h->times) {
            os << format_real(t) << '\n';
        }
    } else {
        const auto& t = std::get<TerminalSampleSet>(out);
        os << "# censored=" << t.censored_count << '\n';
        os << "state\n";
        for (int x : t.states) {
            os << x << '\n';
        }
    }
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergencePoint>& rows)
{
    os << "n,alpha,exact_lt,limit_lt,gap\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_real(r.alpha) << ',' << format_real(r.exact_lt) << ','
           << format_real(r.limit_lt) << ',' << format_real(r.gap) << '\n';
    }
}

} // namespace engset
