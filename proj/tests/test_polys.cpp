#include <doctest.h>

#include <cmath>
#include <vector>

#include "engset/error.hpp"
#include "engset/model.hpp"
#include "engset/polys.hpp"

using namespace engset;

namespace {

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::fmax(m, std::fabs(x));
    }
    return m;
}

} // namespace

TEST_SUITE("polys")
{
    TEST_CASE("boundary values")
    {
        for (int n : {1, 7, 30, 80}) {
            for (double nu : {0.2, 0.5, 0.8}) {
                KrawtchoukBasis b(n, nu);
                for (int k = 0; k <= n; ++k) {
                    auto row = b.row(k);
                    CHECK(row[0] == doctest::Approx(1.0).epsilon(1e-12));
                    double end = std::pow(-(1.0 - nu) / nu, k);
                    CHECK(row[n] == doctest::Approx(end).epsilon(1e-9));
                }
            }
        }
    }

    TEST_CASE("degree one is linear")
    {
        KrawtchoukBasis b(12, 0.3);
        for (int x = 0; x <= 12; ++x) {
            CHECK(b.value(1, x) == doctest::Approx(1.0 - x / (12 * 0.3)));
            CHECK(b.value(0, x) == 1.0);
        }
    }

    TEST_CASE("recurrence agrees with the alternating sum where the sum is exact")
    {
        for (int n : {5, 12, 25}) {
            for (double nu : {0.3, 0.5, 0.7}) {
                KrawtchoukBasis b(n, nu);
                for (int k = 0; k <= std::min(n, 8); ++k) {
                    auto rec = b.recurrence_row(k);
                    double scale = max_abs(rec);
                    for (int x = 0; x <= n; ++x) {
                        CHECK(std::fabs(rec[x] - b.alternating_sum(k, x)) <= 1e-10 * scale);
                    }
                }
            }
        }
    }

    TEST_CASE("eigenfunctions of the generator")
    {
        // Apply the generator from the model module directly.
        for (int n : {4, 17, 30}) {
            auto p = ModelParams::ehrenfest(n, 0.35);
            auto q = build_generator(p);
            KrawtchoukBasis b(p);
            for (int k = 0; k <= n; ++k) {
                auto row = b.row(k);
                auto qk = q.apply(row);
                double scale = max_abs(row) * (n + 1.0);
                for (int x = 0; x <= n; ++x) {
                    CHECK(std::fabs(qk[x] + k * row[x]) <= 1e-10 * scale);
                }
            }
        }
    }

    TEST_CASE("orthogonality and norms")
    {
        for (int n : {3, 10, 30, 60}) {
            for (double nu : {0.25, 0.6}) {
                KrawtchoukBasis b(n, nu);
                std::vector<std::vector<double>> rows;
                for (int k = 0; k <= n; ++k) {
                    rows.push_back(b.row(k));
                }
                double worst_cross = 0.0;
                double worst_norm = 0.0;
                for (int i = 0; i <= n; ++i) {
                    for (int j = i; j <= n; ++j) {
                        double net = 0.0;
                        double mag = 0.0;
                        for (int x = 0; x <= n; ++x) {
                            double t = std::exp(b.log_weight(x)) * rows[i][x] * rows[j][x];
                            net += t;
                            mag += std::fabs(t);
                        }
                        if (i == j) {
                            worst_norm = std::fmax(worst_norm, std::fabs(std::log(net) - b.log_norm2(i)));
                        } else {
                            worst_cross = std::fmax(worst_cross, std::fabs(net) / mag);
                        }
                    }
                }
                INFO("N=" << n << " nu=" << nu);
                const double tol = n <= 30 ? 1e-10 : 1e-8;
                CHECK(worst_cross <= tol);
                CHECK(worst_norm <= tol);
            }
        }
    }

    TEST_CASE("generating identity")
    {
        for (int n : {1, 6, 20, 30}) {
            auto p = ModelParams::ehrenfest(n, 0.45);
            for (double u : {-1.0, -0.3, 0.0, 0.5, 1.0}) {
                for (int x = 0; x <= n; ++x) {
                    CHECK(generating_identity_residual(x, u, p).relative() <= 1e-10);
                }
            }
        }
        CHECK_THROWS_AS(generating_identity_residual(0, 1.5, ModelParams::ehrenfest(3, 0.5)), Error);
    }

    TEST_CASE("generating identity by hand for N = 2")
    {
        // sum_n binom(2,n) K_n(x) u^n with K_n from the explicit sums.
        const double r = 0.6 / 0.4;
        auto p = ModelParams::ehrenfest(2, 0.4);
        KrawtchoukBasis b(p);
        CHECK(b.value(2, 1) == doctest::Approx(-r));
        CHECK(b.value(2, 2) == doctest::Approx(r * r));
        CHECK(b.value(1, 2) == doctest::Approx(1.0 - 2.0 / (2 * 0.4)));
        double u = 0.7;
        double lhs = 1.0 + 2.0 * b.value(1, 1) * u + b.value(2, 1) * u * u;
        CHECK(lhs == doctest::Approx((1.0 + u) * (1.0 - r * u)));
    }

    TEST_CASE("Krawtchouk martingale residuals")
    {
        for (int n : {1, 9, 30}) {
            for (double nu : {0.2, 0.5, 0.8}) {
                auto p = ModelParams::ehrenfest(n, nu);
                for (int k = 0; k <= n; ++k) {
                    for (int x = 0; x <= n; ++x) {
                        CHECK(krawtchouk_martingale_residual(k, p, x).relative() <= 1e-9);
                    }
                }
            }
        }
        CHECK_THROWS_AS(krawtchouk_martingale_residual(1, ModelParams::engset(5, 3, 0.5), 1), Error);
    }

    TEST_CASE("argument checks")
    {
        CHECK_THROWS_AS(KrawtchoukBasis(0, 0.5), Error);
        CHECK_THROWS_AS(KrawtchoukBasis(5, 1.0), Error);
        KrawtchoukBasis b(5, 0.5);
        CHECK_THROWS_AS(b.value(6, 0), Error);
        CHECK_THROWS_AS(b.value(1, -1), Error);
    }
}
