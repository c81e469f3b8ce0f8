#include <doctest.h>

#include <cmath>

#include "engset/error.hpp"
#include "engset/laplace.hpp"
#include "engset/martingale.hpp"
#include "engset/sim.hpp"
#include "engset/stats.hpp"

using namespace engset;

TEST_SUITE("martingale")
{
    TEST_CASE("beta zero gives the constant one")
    {
        auto p = ModelParams::ehrenfest(7, 0.3);
        for (int x = 0; x <= 7; ++x) {
            CHECK(exp_martingale_value(p, 0.0, x, 1.3).value() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(harmonicity_residual(p, 0.0, x, 1.3).absolute <= 1e-15);
        }
    }

    TEST_CASE("single particle residual vanishes")
    {
        auto p = ModelParams::ehrenfest(1, 0.5);
        for (int x : {0, 1}) {
            CHECK(harmonicity_residual(p, 0.2, x, 0.0).absolute <= 1e-16);
            CHECK(harmonicity_residual(p, 0.2, x, 2.0).relative() <= 1e-15);
        }
    }

    TEST_CASE("hand value")
    {
        // N=2, x=1, beta=0.5, nu=0.5, t=0: (1-0.25)(1+0.25).
        auto p = ModelParams::ehrenfest(2, 0.5);
        CHECK(exp_martingale_value(p, 0.5, 1, 0.0).value() == doctest::Approx(0.9375).epsilon(1e-15));
    }

    TEST_CASE("sign changes are tracked")
    {
        // 1 - beta mu e^t < 0 for beta = 3, mu = 0.5, t = 0.
        auto p = ModelParams::ehrenfest(5, 0.5);
        auto v = exp_martingale_value(p, 3.0, 3, 0.0);
        CHECK(v.sign == -1);
        CHECK(v.value() == doctest::Approx(-0.125 * std::pow(2.5, 2)).epsilon(1e-14));
        CHECK(exp_martingale_value(p, 2.0, 2, 0.0).is_zero());
        CHECK(harmonicity_residual(p, 3.0, 3, 0.0).relative() <= 1e-14);
        CHECK(harmonicity_residual(p, 2.0, 2, 0.0).relative() <= 1e-14);
    }

    TEST_CASE("residual grid")
    {
        double worst = 0.0;
        for (int n : {1, 2, 5, 10, 30, 100}) {
            for (double nu : {0.1, 0.4, 0.5, 0.9}) {
                auto p = ModelParams::ehrenfest(n, nu);
                for (double beta : {-2.0, -0.3, 0.1, 0.7, 3.0}) {
                    for (double t : {0.0, 0.7, 3.0}) {
                        for (int x = 0; x <= n; ++x) {
                            worst = std::fmax(worst, harmonicity_residual(p, beta, x, t).relative());
                        }
                    }
                }
            }
        }
        CHECK(worst <= 1e-9);
    }

    TEST_CASE("relative to the martingale itself")
    {
        auto p = ModelParams::ehrenfest(10, 0.4);
        for (int x = 0; x <= 10; ++x) {
            auto r = harmonicity_residual(p, 0.1, x, 0.7);
            CHECK(r.absolute <= 1e-9 * std::fabs(exp_martingale_value(p, 0.1, x, 0.7).value()));
        }
    }

    TEST_CASE("finite difference in time")
    {
        auto p = ModelParams::ehrenfest(10, 0.4);
        for (double beta : {-0.5, 0.1, 1.5}) {
            for (int x : {0, 4, 10}) {
                CHECK(harmonicity_residual_fd(p, beta, x, 0.7).relative() <= 1e-4);
            }
        }
        CHECK_THROWS_AS(harmonicity_residual_fd(p, 0.1, 2, 0.0), Error);
    }

    TEST_CASE("reflected process is refused")
    {
        auto e = ModelParams::engset(10, 6, 0.4);
        CHECK_THROWS_AS(exp_martingale_value(e, 0.1, 2, 0.0), Error);
        CHECK_THROWS_AS(harmonicity_residual(e, 0.1, 2, 0.0), Error);
        CHECK_THROWS_AS(exp_martingale_value(ModelParams::ehrenfest(3, 0.4), 0.1, 1, -1.0), Error);
    }

    TEST_CASE("integrated martingales at time zero")
    {
        auto p = ModelParams::ehrenfest(9, 0.35);
        for (int x : {0, 4, 9}) {
            CHECK(integrated_I(p, 0.8, x, 0.0) == doctest::Approx(coef_B(p, x, 0.8).value()).epsilon(1e-15));
            CHECK(integrated_J(p, 0.8, x, 0.0) == doctest::Approx(coef_D(p, x, 0.8).value()).epsilon(1e-15));
            CHECK(integrated_log_I(p, 0.8, x, 2.0) == doctest::Approx(integrated_log_I(p, 0.8, x, 0.0) - 1.6));
        }
    }

    TEST_CASE("integrating h over beta reproduces I and J")
    {
        for (double nu : {0.3, 0.5, 0.8}) {
            auto p = ModelParams::ehrenfest(12, nu);
            for (double a : {0.3, 1.0, 4.0}) {
                for (double t : {0.0, 0.5, 2.0}) {
                    for (int x : {0, 5, 12}) {
                        CHECK(integrated_log_I_over_beta(p, a, x, t) ==
                              doctest::Approx(integrated_log_I(p, a, x, t)).epsilon(1e-10));
                        CHECK(integrated_log_J_over_beta(p, a, x, t) ==
                              doctest::Approx(integrated_log_J(p, a, x, t)).epsilon(1e-10));
                    }
                }
            }
        }
    }

    TEST_CASE("I and J are harmonic for the unreflected process")
    {
        auto p = ModelParams::ehrenfest(20, 0.45);
        for (double a : {0.01, 1.0, 10.0}) {
            for (int x = 1; x <= 20; ++x) {
                CHECK(integrated_residual(IntegratedKind::I, p, a, x).relative() <= 1e-10);
                CHECK(integrated_residual(IntegratedKind::J, p, a, x - 1).relative() <= 1e-10);
            }
            // Each is stopped at its target, where harmonicity fails.
            CHECK(integrated_residual(IntegratedKind::I, p, a, 0).relative() > 0.5);
            CHECK(integrated_residual(IntegratedKind::J, p, a, 20).relative() > 0.5);
        }
    }

    TEST_CASE("K is harmonic up to and including the reflecting state")
    {
        auto p = ModelParams::engset(6, 4, 0.4);
        CHECK(integrated_residual(IntegratedKind::K, p, 1.0, 4).relative() <= 1e-10);
        for (int n : {6, 15, 40}) {
            auto e = ModelParams::engset(n, 2 * n / 3, 0.4);
            for (double a : {0.1, 1.0, 5.0}) {
                for (int x = 1; x <= e.capacity(); ++x) {
                    CHECK(integrated_residual(IntegratedKind::K, e, a, x).relative() <= 1e-10);
                }
            }
        }
    }

    TEST_CASE("I alone breaks at the reflecting state")
    {
        auto e = ModelParams::engset(6, 4, 0.4);
        CHECK(integrated_residual(IntegratedKind::I, e, 1.0, 2).relative() <= 1e-10);
        CHECK(integrated_residual(IntegratedKind::I, e, 1.0, 4).relative() > 1e-3);
        CHECK(integrated_residual(IntegratedKind::J, e, 1.0, 4).relative() > 1e-3);
    }

    TEST_CASE("K needs C < N")
    {
        CHECK_THROWS_AS(engset_K_value(ModelParams::ehrenfest(6, 0.4), 1.0, 2, 0.0), Error);
        auto e = ModelParams::engset(6, 4, 0.4);
        double k = engset_K_value(e, 1.0, 2, 0.0);
        double ref = coef_d(e, 1.0).value() * coef_B(e, 2, 1.0).value()
                     + coef_b(e, 1.0).value() * coef_D(e, 2, 1.0).value();
        CHECK(k == doctest::Approx(ref).epsilon(1e-13));
    }

    TEST_CASE("stopped integrated martingale keeps its mean")
    {
        // E[I(t ^ T0)] = I(x, 0) along simulated paths.
        auto p = ModelParams::ehrenfest(3, 0.5);
        const double a = 1.0;
        SimConfig c;
        c.params = p;
        c.start_state = 2;
        c.stop_rule = HitState{0};
        c.n_paths = 100000;
        c.master_seed = 7;
        auto s = simulate_stopped(c, 1.0);
        std::vector<double> vals(s.states.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            vals[i] = integrated_I(p, a, s.states[i], s.stop_times[i]);
        }
        auto m = summarize(vals);
        CHECK(std::fabs(m.mean - coef_B(p, 2, a).value()) <= 4.0 * m.std_error);
    }
}
