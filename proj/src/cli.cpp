#include "engset/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "engset/asymptotics.hpp"
#include "engset/error.hpp"
#include "engset/laplace.hpp"
#include "engset/model.hpp"
#include "engset/sample_io.hpp"
#include "engset/sim.hpp"
#include "engset/verify.hpp"

namespace engset::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct ModelFlags {
    std::string process;
    int n = 0;
    std::optional<int> c;
    double nu = 0.0;
    std::optional<double> mu;
};

struct OutputFlags {
    std::string format = "json";
    std::string output;
};

void add_model_flags(CLI::App* sub, ModelFlags& f)
{
    sub->add_option("--process", f.process, "ehrenfest or engset (default: engset when C < N)")
        ->check(CLI::IsMember({"ehrenfest", "engset"}));
    sub->add_option("--n", f.n, "number of sources N")->required()->check(CLI::PositiveNumber);
    sub->add_option("--c", f.c, "capacity C (default N)")->check(CLI::PositiveNumber);
    sub->add_option("--nu", f.nu, "activation rate nu")->required();
    sub->add_option("--mu", f.mu, "deactivation rate mu (default 1 - nu)");
}

void add_output_flags(CLI::App* sub, OutputFlags& f)
{
    sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", f.output, "write to this file instead of standard output");
}

ModelParams resolve(const ModelFlags& f)
{
    const int c = f.c.value_or(f.n);
    ProcessKind kind = c < f.n ? ProcessKind::Engset : ProcessKind::Ehrenfest;
    if (!f.process.empty()) {
        kind = parse_process_kind(f.process);
    }
    return ModelParams::make(kind, f.n, c, f.nu, f.mu);
}

json envelope(const std::string& command, json resolved, json results, json diagnostics)
{
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"resolved_params", std::move(resolved)},
            {"results", std::move(results)},
            {"diagnostics", std::move(diagnostics)}};
}

std::string csv_cell(const json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_float()) {
        return format_real(v.get<double>());
    }
    if (v.is_null()) {
        return "";
    }
    if (v.is_primitive()) {
        return v.dump();
    }
    std::string s = v.dump();
    std::string quoted = "\"";
    for (char ch : s) {
        quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return quoted + "\"";
}

void write_csv_rows(std::ostream& os, const std::vector<json>& rows)
{
    if (rows.empty()) {
        return;
    }
    bool first = true;
    for (auto it = rows.front().begin(); it != rows.front().end(); ++it) {
        os << (first ? "" : ",") << it.key();
        first = false;
    }
    os << '\n';
    for (const auto& r : rows) {
        first = true;
        for (auto it = rows.front().begin(); it != rows.front().end(); ++it) {
            os << (first ? "" : ",") << (r.contains(it.key()) ? csv_cell(r[it.key()]) : "");
            first = false;
        }
        os << '\n';
    }
}

/// Sends a finished document to --output or to `out`.
class Sink {
public:
    Sink(const OutputFlags& flags, std::ostream& out) : flags_(flags), out_(out) {}

    template <class Writer>
    void write(Writer&& w)
    {
        if (flags_.output.empty()) {
            w(out_);
            return;
        }
        std::ofstream f(flags_.output, std::ios::binary);
        if (!f) {
            fail(ErrorCode::InvalidArgument, "cannot open output file " + flags_.output);
        }
        w(f);
    }

    void json_doc(const json& doc)
    {
        write([&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }

private:
    const OutputFlags& flags_;
    std::ostream& out_;
};

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::RegimeMismatch:
        return kExitUsage;
    default:
        return kExitNumerical;
    }
}

json error_payload(const Error& e)
{
    json j = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (const auto* q = dynamic_cast<const QuadratureError*>(&e)) {
        j["best_estimate"] = q->best_estimate();
        j["error_estimate"] = q->error_estimate();
        j["node_count"] = q->node_count();
    }
    return j;
}

// ---- laplace -------------------------------------------------------------

struct LaplaceFlags {
    ModelFlags model;
    OutputFlags output;
    int from = 0;
    int to = 0;
    double alpha = 1.0;
    bool check = false;
    int oracle_cap = 2000;
};

int cmd_laplace(const LaplaceFlags& f, Sink& sink)
{
    ModelParams p = resolve(f.model);
    LaplaceQuery q{p, f.from, f.to, f.alpha};
    validate(q);
    json resolved = params_to_json(p);
    resolved["from"] = f.from;
    resolved["to"] = f.to;
    resolved["alpha"] = f.alpha;
    resolved["check"] = f.check;

    auto t = hitting_transform(q);
    json results = {{"lt", t.lt()},
                    {"log_lt", t.log_lt},
                    {"family", std::string(to_string(t.family))},
                    {"rel_error_estimate", t.rel_error},
                    {"node_count", t.node_count}};
    json diagnostics = json::object();
    if (f.check) {
        if (p.num_states() <= f.oracle_cap) {
            double o = resolvent_oracle(q, {f.oracle_cap});
            results["oracle_lt"] = o;
            results["relative_gap"] = std::fabs(t.lt() - o) / o;
        } else {
            diagnostics["oracle"] = "skipped: state space exceeds --oracle-cap";
        }
    }
    if (f.output.format == "csv") {
        sink.write([&](std::ostream& os) { write_csv_rows(os, {results}); });
    } else {
        sink.json_doc(envelope("laplace", resolved, results, diagnostics));
    }
    return kExitOk;
}

// ---- mean ----------------------------------------------------------------

struct MeanFlags {
    ModelFlags model;
    OutputFlags output;
    int from = 0;
    int to = 0;
    bool check = false;
};

int cmd_mean(const MeanFlags& f, Sink& sink)
{
    ModelParams p = resolve(f.model);
    json resolved = params_to_json(p);
    resolved["from"] = f.from;
    resolved["to"] = f.to;
    resolved["check"] = f.check;
    double lm = log_mean_hitting_time(p, f.from, f.to);
    json results = {{"mean", f.from == f.to ? 0.0 : std::exp(lm)}};
    results["log_mean"] = f.from == f.to ? json(nullptr) : json(lm);
    if (f.check && f.from != f.to) {
        auto c = mean_cross_check(p, f.from, f.to);
        results["extrapolated_mean"] = c.extrapolated;
        results["relative_gap"] = c.relative_gap;
    }
    if (f.output.format == "csv") {
        sink.write([&](std::ostream& os) { write_csv_rows(os, {results}); });
    } else {
        sink.json_doc(envelope("mean", resolved, results, json::object()));
    }
    return kExitOk;
}

// ---- simulate ------------------------------------------------------------

struct SimulateFlags {
    ModelFlags model;
    OutputFlags output;
    int from = 0;
    std::optional<int> hit;
    std::optional<double> t_max;
    std::optional<double> horizon;
    long paths = 10000;
    std::uint64_t seed = 0;
    long max_events = 1000000000L;
    int threads = 0;
    std::vector<double> alphas;
};

int cmd_simulate(const SimulateFlags& f, Sink& sink, std::ostream& err)
{
    SimConfig c;
    c.params = resolve(f.model);
    c.start_state = f.from;
    if (f.hit.has_value() == f.t_max.has_value()) {
        fail(ErrorCode::InvalidArgument, "give exactly one of --hit and --t-max");
    }
    if (f.hit) {
        HitState h{*f.hit};
        if (f.horizon) {
            h.horizon = *f.horizon;
        }
        c.stop_rule = h;
    } else {
        require(!f.horizon, "--horizon applies to --hit only");
        require(f.alphas.empty(), "--alpha applies to --hit only");
        c.stop_rule = TimeHorizon{*f.t_max};
    }
    c.n_paths = f.paths;
    c.master_seed = f.seed;
    c.max_events_per_path = f.max_events;
    c.threads = f.threads;

    SimulationOutput out = simulate_paths(c);
    long capped = std::visit([](const auto& s) { return s.censored_count; }, out);

    json results = {{"summary", sample_summary_json(out)}};
    json diagnostics = json::object();
    int status = kExitOk;
    if (capped > 0) {
        diagnostics["error"] = {{"code", std::string(to_string(ErrorCode::Censored))},
                                {"message", std::to_string(capped) + " paths hit the event cap"}};
        err << "engset: " << capped << " paths hit the event cap\n";
        status = kExitNumerical;
    }
    if (!f.alphas.empty()) {
        json lts = json::array();
        const auto& h = std::get<HittingSampleSet>(out);
        for (double a : f.alphas) {
            try {
                auto e = empirical_lt(h, a);
                lts.push_back({{"alpha", a},
                               {"estimate", e.estimate},
                               {"std_error", e.std_error},
                               {"truncation_bound", e.truncation_bound}});
            } catch (const Error& e) {
                lts.push_back({{"alpha", a}, {"error", error_payload(e)}});
                err << "engset: " << e.what() << '\n';
                status = std::max(status, exit_code_for(e.code()));
            }
        }
        results["empirical_lt"] = lts;
    }
    if (f.output.format == "csv") {
        sink.write([&](std::ostream& os) { write_samples_csv(os, c, out); });
    } else {
        sink.json_doc(envelope("simulate", sim_config_to_json(c), results, diagnostics));
    }
    return status;
}

// ---- regime --------------------------------------------------------------

struct RegimeFlags {
    ModelFlags model;
    OutputFlags output;
    double x0 = 0.0;
    double band = RegimeOptions{}.band;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_regime(const RegimeFlags& f, Sink& sink)
{
    ModelParams p = resolve(f.model);
    auto r = classify_regime(p, {f.x0, f.band});
    json resolved = params_to_json(p);
    resolved["x0"] = f.x0;
    resolved["band"] = f.band;
    json results = {{"regime", std::string(to_string(r.regime))},
                    {"eta", r.eta},
                    {"t_star", optional_json(r.t_star)},
                    {"entropy_h", optional_json(r.entropy_h)},
                    {"limit_variance", optional_json(r.limit_variance)},
                    {"critical_delta", optional_json(r.critical_delta)},
                    {"blocking_limit", optional_json(r.blocking_limit)},
                    {"boundary_mass_limit", optional_json(r.boundary_mass_limit)}};
    if (f.output.format == "csv") {
        sink.write([&](std::ostream& os) { write_csv_rows(os, {results}); });
    } else {
        sink.json_doc(envelope("regime", resolved, results, json::object()));
    }
    return kExitOk;
}

// ---- limit-check ---------------------------------------------------------

struct LimitFlags {
    OutputFlags output;
    std::string law;
    std::string process = "engset";
    double nu = 0.5;
    double eta = 1.0;
    double delta = 0.0;
    std::vector<int> ns{40, 80, 160};
    std::vector<double> alphas{0.5, 1.0, 2.0};
    int threads = 0;
};

int cmd_limit_check(const LimitFlags& f, Sink& sink)
{
    Scenario s;
    s.law = parse_law_kind(f.law);
    s.process = parse_process_kind(f.process);
    s.nu = f.nu;
    s.eta = f.eta;
    s.delta = f.delta;
    auto rows = convergence_study(s, f.ns, f.alphas, f.threads);

    json resolved = {{"law", f.law},          {"process", f.process}, {"nu", f.nu},
                     {"eta", f.eta},          {"delta", f.delta},     {"n_list", f.ns},
                     {"alpha_list", f.alphas}};
    json table = json::array();
    for (const auto& r : rows) {
        table.push_back({{"n", r.n},
                         {"alpha", r.alpha},
                         {"exact_lt", r.exact_lt},
                         {"limit_lt", r.limit_lt},
                         {"gap", r.gap}});
    }
    json trend = json::array();
    for (double a : f.alphas) {
        std::vector<double> gaps;
        for (const auto& r : rows) {
            if (r.alpha == a) {
                gaps.push_back(r.gap);
            }
        }
        trend.push_back({{"alpha", a},
                         {"first_gap", gaps.front()},
                         {"last_gap", gaps.back()},
                         {"gap_decreased", gaps.size() < 2 || gaps.back() < gaps.front()}});
    }
    if (f.output.format == "csv") {
        sink.write([&](std::ostream& os) { write_convergence_csv(os, rows); });
    } else {
        sink.json_doc(envelope("limit-check", resolved, {{"rows", table}, {"trend", trend}},
                               json::object()));
    }
    return kExitOk;
}

// ---- verify --------------------------------------------------------------

int cmd_verify(const OutputFlags& o, Sink& sink)
{
    auto suites = run_invariant_suites();
    json list = json::array();
    long passed = 0;
    long failed = 0;
    for (const auto& s : suites) {
        passed += s.passed;
        failed += s.failed;
        list.push_back({{"suite", s.name},
                        {"passed", s.passed},
                        {"failed", s.failed},
                        {"worst", s.worst},
                        {"tolerance", s.tolerance},
                        {"failures", s.failures}});
    }
    if (o.format == "csv") {
        std::vector<json> rows(list.begin(), list.end());
        sink.write([&](std::ostream& os) { write_csv_rows(os, rows); });
    } else {
        sink.json_doc(envelope("verify", json::object(),
                               {{"suites", list}, {"passed", passed}, {"failed", failed}},
                               json::object()));
    }
    return failed == 0 ? kExitOk : kExitNumerical;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Hitting times of the Ehrenfest and Engset processes", "engset"};
    app.require_subcommand(1);

    LaplaceFlags lf;
    auto* laplace = app.add_subcommand("laplace", "exact Laplace transform of a hitting time");
    add_model_flags(laplace, lf.model);
    add_output_flags(laplace, lf.output);
    laplace->add_option("--from", lf.from, "start state")->required();
    laplace->add_option("--to", lf.to, "target state")->required();
    laplace->add_option("--alpha", lf.alpha, "transform argument (caller time units)");
    laplace->add_flag("--check", lf.check, "also solve the resolvent system");
    laplace->add_option("--oracle-cap", lf.oracle_cap, "largest state space for --check");

    MeanFlags mf;
    auto* mean = app.add_subcommand("mean", "expected hitting time");
    add_model_flags(mean, mf.model);
    add_output_flags(mean, mf.output);
    mean->add_option("--from", mf.from, "start state")->required();
    mean->add_option("--to", mf.to, "target state")->required();
    mean->add_flag("--check", mf.check, "compare with the small-alpha limit of the transform");

    SimulateFlags sf;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo paths");
    add_model_flags(simulate, sf.model);
    add_output_flags(simulate, sf.output);
    simulate->add_option("--from", sf.from, "start state")->required();
    simulate->add_option("--hit", sf.hit, "stop at the first visit to this state");
    simulate->add_option("--t-max", sf.t_max, "stop every path at this time");
    simulate->add_option("--horizon", sf.horizon, "give up on --hit paths after this time");
    simulate->add_option("--paths", sf.paths, "number of paths")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sf.seed, "master seed");
    simulate->add_option("--max-events", sf.max_events, "event cap per path")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--threads", sf.threads, "worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--alpha", sf.alphas, "empirical Laplace transforms at these values");

    RegimeFlags rf;
    auto* regime = app.add_subcommand("regime", "regime classification and constants");
    add_model_flags(regime, rf.model);
    add_output_flags(regime, rf.output);
    regime->add_option("--x0", rf.x0, "start fraction in [0, C/N]");
    regime->add_option("--band", rf.band, "critical when |C - nu N| <= band sqrt(N)");

    LimitFlags limf;
    auto* limit = app.add_subcommand("limit-check", "finite-N transforms against a limit law");
    add_output_flags(limit, limf.output);
    limit->add_option("--law", limf.law, "limit law")
        ->required()
        ->check(CLI::IsMember({"SuperCriticalNormal", "SubCritFullExp", "SubCritEntropyExp",
                               "SubCritEmptyExp", "CriticalSaturation", "CriticalEmptyExp"}));
    limit->add_option("--process", limf.process, "ehrenfest or engset")
        ->check(CLI::IsMember({"ehrenfest", "engset"}));
    limit->add_option("--nu", limf.nu, "activation rate nu")->required();
    limit->add_option("--eta", limf.eta, "capacity fraction C/N");
    limit->add_option("--delta", limf.delta, "critical offset (C - nu N)/sqrt(N)");
    limit->add_option("--n-list", limf.ns, "values of N")->delimiter(',');
    limit->add_option("--alpha-list", limf.alphas, "transform arguments")->delimiter(',');
    limit->add_option("--threads", limf.threads, "worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);

    OutputFlags vf;
    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    add_output_flags(verify, vf);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    const OutputFlags* of = &vf;
    if (laplace->parsed()) {
        of = &lf.output;
    } else if (mean->parsed()) {
        of = &mf.output;
    } else if (simulate->parsed()) {
        of = &sf.output;
    } else if (regime->parsed()) {
        of = &rf.output;
    } else if (limit->parsed()) {
        of = &limf.output;
    }
    Sink sink(*of, out);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (laplace->parsed()) {
            return cmd_laplace(lf, sink);
        }
        if (mean->parsed()) {
            return cmd_mean(mf, sink);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sf, sink, err);
        }
        if (regime->parsed()) {
            return cmd_regime(rf, sink);
        }
        if (limit->parsed()) {
            return cmd_limit_check(limf, sink);
        }
        return cmd_verify(vf, sink);
    } catch (const Error& e) {
        err << "engset " << command << ": " << e.what() << '\n';
        int code = exit_code_for(e.code());
        if (code == kExitNumerical && of->format == "json") {
            try {
                sink.json_doc(envelope(command, json::object(), json::object(),
                                       {{"error", error_payload(e)}}));
            } catch (const Error&) {
            }
        }
        return code;
    }
}

} // namespace engset::cli
