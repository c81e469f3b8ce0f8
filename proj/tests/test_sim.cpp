#include <doctest.h>

#include <cmath>
#include <sstream>

#include "engset/error.hpp"
#include "engset/laplace.hpp"
#include "engset/sample_io.hpp"
#include "engset/sim.hpp"
#include "engset/stats.hpp"

using namespace engset;

namespace {

SimConfig hit_config(const ModelParams& p, int from, int to, long paths, std::uint64_t seed)
{
    SimConfig c;
    c.params = p;
    c.start_state = from;
    c.stop_rule = HitState{to};
    c.n_paths = paths;
    c.master_seed = seed;
    c.threads = 1;
    return c;
}

} // namespace

TEST_SUITE("sim")
{
    TEST_CASE("single particle mean")
    {
        auto s = simulate_hitting(hit_config(ModelParams::ehrenfest(1, 0.25), 0, 1, 40000, 3));
        auto m = summarize(s.times);
        CHECK(std::fabs(m.mean - 4.0) <= 4.0 * m.std_error);
        CHECK(s.censored_count == 0);
        CHECK(s.total_paths() == 40000);
    }

    TEST_CASE("terminal states follow the stationary law")
    {
        auto p = ModelParams::ehrenfest(50, 0.5);
        SimConfig c;
        c.params = p;
        c.start_state = 0;
        c.stop_rule = TimeHorizon{10.0};
        c.n_paths = 20000;
        c.master_seed = 11;
        auto s = simulate_terminal(c);
        auto pi = stationary_distribution(p);
        std::vector<double> obs(pi.size(), 0.0);
        std::vector<double> exp(pi.size());
        for (int x : s.states) {
            obs[x] += 1.0;
        }
        for (std::size_t i = 0; i < pi.size(); ++i) {
            exp[i] = pi[i] * static_cast<double>(s.states.size());
        }
        CHECK(chi_square_test(obs, exp).p_value > 1e-3);
    }

    TEST_CASE("terminal state at time zero is the start")
    {
        SimConfig c;
        c.params = ModelParams::engset(10, 6, 0.4);
        c.start_state = 4;
        c.stop_rule = TimeHorizon{0.0};
        c.n_paths = 10;
        for (int x : simulate_terminal(c).states) {
            CHECK(x == 4);
        }
    }

    TEST_CASE("thread count never changes the output")
    {
        auto c = hit_config(ModelParams::engset(25, 15, 0.4), 15, 0, 3001, 99);
        c.stop_rule = HitState{0, 100.0};
        auto a = simulate_hitting(c);
        for (int t : {2, 3, 7}) {
            c.threads = t;
            auto b = simulate_hitting(c);
            CHECK(a.times == b.times);
            CHECK(a.config_digest == b.config_digest);
        }
    }

    TEST_CASE("different seeds differ")
    {
        auto a = simulate_hitting(hit_config(ModelParams::ehrenfest(5, 0.5), 0, 5, 100, 1));
        auto b = simulate_hitting(hit_config(ModelParams::ehrenfest(5, 0.5), 0, 5, 100, 2));
        CHECK(a.times != b.times);
        CHECK(a.config_digest != b.config_digest);
    }

    TEST_CASE("digest ignores threads only")
    {
        auto c = hit_config(ModelParams::ehrenfest(5, 0.5), 0, 5, 100, 1);
        auto d = config_digest(c);
        CHECK(d.size() == 16);
        c.threads = 4;
        CHECK(config_digest(c) == d);
        c.n_paths = 101;
        CHECK(config_digest(c) != d);
        c.n_paths = 100;
        c.stop_rule = HitState{4};
        CHECK(config_digest(c) != d);
    }

    TEST_CASE("empirical transform at alpha zero")
    {
        auto s = simulate_hitting(hit_config(ModelParams::ehrenfest(4, 0.5), 0, 4, 50, 1));
        auto e = empirical_lt(s, 0.0);
        CHECK(e.estimate == 1.0);
        CHECK(e.std_error == 0.0);
    }

    TEST_CASE("empirical transform with a horizon")
    {
        auto p = ModelParams::ehrenfest(8, 0.5);
        const double a = 1.0;
        auto c = hit_config(p, 0, 8, 20000, 5);
        c.stop_rule = HitState{8, 40.0 / a};
        auto s = simulate_hitting(c);
        auto e = empirical_lt(s, a);
        CHECK(std::fabs(e.estimate - hitting_lt({p, 0, 8, a})) <= 4.0 * e.std_error);
        CHECK(e.truncation_bound <= 1e-3 * e.std_error);
        CHECK(s.horizon_censored_count > 0);
    }

    TEST_CASE("standard error shrinks with the square root of the paths")
    {
        auto p = ModelParams::engset(10, 6, 0.4);
        auto s1 = simulate_hitting(hit_config(p, 6, 0, 10000, 8));
        auto s2 = simulate_hitting(hit_config(p, 6, 0, 20000, 9));
        double ratio = empirical_lt(s1, 1.0).std_error / empirical_lt(s2, 1.0).std_error;
        CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
    }

    TEST_CASE("censoring is refused")
    {
        auto p = ModelParams::ehrenfest(20, 0.5);
        auto c = hit_config(p, 0, 20, 200, 5);
        c.max_events_per_path = 5;
        auto s = simulate_hitting(c);
        CHECK(s.censored_count == 200);
        CHECK_THROWS_AS(empirical_lt(s, 1.0), Error);

        c.max_events_per_path = 1000000000L;
        c.stop_rule = HitState{20, 1.0};
        auto h = simulate_hitting(c);
        CHECK(h.horizon_censored_count > 0);
        try {
            empirical_lt(h, 0.1);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Censored);
        }
    }

    TEST_CASE("particles and jump chain agree in law")
    {
        auto p = ModelParams::ehrenfest(12, 0.4);
        auto a = simulate_hitting(hit_config(p, 0, 9, 4000, 21));
        auto b = simulate_hitting_particles(hit_config(p, 0, 9, 4000, 22));
        double d = ks_two_sample_statistic(a.times, b.times);
        CHECK(ks_p_value(d, 2000.0) > 1e-3);
        CHECK_THROWS_AS(simulate_hitting_particles(hit_config(ModelParams::engset(12, 9, 0.4), 0, 9, 10, 1)),
                        Error);
    }

    TEST_CASE("caller time units")
    {
        // nu = 2, mu = 2: same chain as nu = mu = 0.5 run four times as fast.
        auto fast = simulate_hitting(hit_config(ModelParams::ehrenfest(1, 2.0, 2.0), 0, 1, 20000, 4));
        auto m = summarize(fast.times);
        CHECK(std::fabs(m.mean - 0.5) <= 4.0 * m.std_error);
    }

    TEST_CASE("fluid deviation")
    {
        SimConfig c;
        c.params = ModelParams::engset(100, 60, 0.3);
        c.stop_rule = TimeHorizon{5.0};
        c.n_paths = 200;
        c.master_seed = 1;
        CHECK(fluid_deviation(c) > 0.0);

        SimConfig zero = c;
        zero.stop_rule = TimeHorizon{0.0};
        CHECK(fluid_deviation(zero, 2) == 0.0);

        SimConfig big = c;
        big.params = ModelParams::engset(400, 240, 0.3);
        double ratio = fluid_deviation(c) / fluid_deviation(big);
        CHECK(ratio > 1.4);
        CHECK(ratio < 2.6);
    }

    TEST_CASE("saturated fluid pins at the capacity")
    {
        SimConfig c;
        c.params = ModelParams::engset(400, 120, 0.6);
        c.stop_rule = TimeHorizon{10.0};
        c.n_paths = 200;
        c.master_seed = 2;
        auto s = simulate_terminal(c);
        double mean = 0.0;
        for (int x : s.states) {
            mean += x / 400.0;
        }
        mean /= static_cast<double>(s.states.size());
        CHECK(mean == doctest::Approx(0.3).epsilon(0.02));
        CHECK(fluid_deviation(c) < 0.05);
    }

    TEST_CASE("csv output")
    {
        auto c = hit_config(ModelParams::ehrenfest(3, 0.5), 0, 3, 5, 1);
        auto s = simulate_paths(c);
        std::ostringstream os;
        write_samples_csv(os, c, s);
        auto text = os.str();
        CHECK(text.find("# schema_version=1 config_digest=" + config_digest(c)) == 0);
        CHECK(text.find("\ntime\n") != std::string::npos);
    }

    TEST_CASE("invalid configs")
    {
        auto c = hit_config(ModelParams::engset(10, 6, 0.4), 7, 0, 10, 1);
        CHECK_THROWS_AS(simulate_hitting(c), Error);
        c.start_state = 0;
        c.n_paths = 0;
        CHECK_THROWS_AS(simulate_hitting(c), Error);
        c.n_paths = 10;
        c.stop_rule = TimeHorizon{1.0};
        CHECK_THROWS_AS(simulate_hitting(c), Error);
    }
}

TEST_SUITE("stats")
{
    TEST_CASE("summary")
    {
        std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
        auto s = summarize(xs);
        CHECK(s.count == 4);
        CHECK(s.mean == 2.5);
        CHECK(s.variance == doctest::Approx(5.0 / 3.0));
        CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
        CHECK(s.min == 1.0);
        CHECK(s.max == 4.0);
    }

    TEST_CASE("ks statistic")
    {
        std::vector<double> xs{0.1, 0.4, 0.7};
        auto uniform = [](double x) { return std::fmin(1.0, std::fmax(0.0, x)); };
        CHECK(ks_statistic(xs, uniform) == doctest::Approx(0.3).epsilon(1e-12));
        std::vector<double> ys{0.1, 0.4, 0.7};
        CHECK(ks_two_sample_statistic(xs, ys) == 0.0);
        std::vector<double> zs{5.0, 6.0};
        CHECK(ks_two_sample_statistic(xs, zs) == 1.0);
    }

    TEST_CASE("kolmogorov distribution")
    {
        CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
        CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
        CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
        CHECK(kolmogorov_survival(0.8276) == doctest::Approx(0.5).epsilon(1e-3));
        double prev = 1.0;
        for (double x = 0.05; x < 3.0; x += 0.05) {
            double v = kolmogorov_survival(x);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        CHECK(ks_p_value(0.0, 100.0) == doctest::Approx(1.0));
    }

    TEST_CASE("chi square")
    {
        std::vector<double> obs{10, 20, 30};
        std::vector<double> exp{10, 20, 30};
        auto r = chi_square_test(obs, exp);
        CHECK(r.statistic == 0.0);
        CHECK(r.dof == 2);
        CHECK(r.p_value == doctest::Approx(1.0));
        // Statistic 2 with one degree of freedom.
        std::vector<double> o2{60, 40};
        std::vector<double> e2{50, 50};
        auto r2 = chi_square_test(o2, e2);
        CHECK(r2.statistic == doctest::Approx(4.0));
        CHECK(r2.p_value == doctest::Approx(0.0455).epsilon(1e-3));
        // Small cells are pooled.
        std::vector<double> o3{1, 2, 50, 47};
        std::vector<double> e3{1, 1, 49, 49};
        CHECK(chi_square_test(o3, e3).dof < 3);
    }
}
