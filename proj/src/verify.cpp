#include "engset/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "engset/asymptotics.hpp"
#include "engset/error.hpp"
#include "engset/laplace.hpp"
#include "engset/martingale.hpp"
#include "engset/polys.hpp"

namespace engset {

namespace {

class Suite {
public:
    Suite(std::string name, double tolerance)
    {
        report_.name = std::move(name);
        report_.tolerance = tolerance;
    }

    void check(double metric, const std::function<std::string()>& describe)
    {
        bool ok = std::isfinite(metric) && metric <= report_.tolerance;
        if (!std::isfinite(metric)) {
            report_.worst = INFINITY;
        } else {
            report_.worst = std::fmax(report_.worst, metric);
        }
        if (ok) {
            ++report_.passed;
            return;
        }
        ++report_.failed;
        if (report_.failures.size() < 5) {
            char buf[48];
            std::snprintf(buf, sizeof buf, " (metric %.3g)", metric);
            report_.failures.push_back(describe() + buf);
        }
    }

    /// Runs body, turning a thrown error into a failed check.
    void guarded(const std::function<void()>& body, const std::function<std::string()>& describe)
    {
        try {
            body();
        } catch (const Error& e) {
            check(INFINITY, [&] { return describe() + ": " + e.what(); });
        }
    }

    SuiteReport take() { return std::move(report_); }

private:
    SuiteReport report_;
};

template <class... Args>
std::string label(const char* fmt, Args... args)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

SuiteReport generator_suite()
{
    Suite s("generator_and_detailed_balance", 1e-12);
    for (int n : {1, 2, 5, 13, 30, 200}) {
        for (double nu : {0.2, 0.5, 0.75}) {
            for (int c : {n, (n + 1) / 2}) {
                auto p = ModelParams::make(c == n ? ProcessKind::Ehrenfest : ProcessKind::Engset, n,
                                           c, nu);
                auto r = build_generator(p);
                auto pi = stationary_distribution(p);
                for (int x = 0; x <= c; ++x) {
                    double out = r.up[x] + r.down[x];
                    s.check(std::fabs(out + r.diagonal(x)) / std::fmax(out, 1.0), [&] {
                        return label("row sum N=%d C=%d nu=%g x=%d", n, c, nu, x);
                    });
                    if (x < c) {
                        double a = pi[x] * r.up[x];
                        double b = pi[x + 1] * r.down[x + 1];
                        s.check(std::fabs(a - b) / std::fmax(a, b), [&] {
                            return label("detailed balance N=%d C=%d nu=%g x=%d", n, c, nu, x);
                        });
                    }
                }
            }
        }
    }
    return s.take();
}

SuiteReport exp_martingale_suite()
{
    Suite s("exponential_martingale", 1e-9);
    for (int n : {1, 2, 5, 10, 20, 30}) {
        for (double nu : {0.2, 0.5, 0.7}) {
            auto p = ModelParams::ehrenfest(n, nu);
            for (double t : {0.0, 0.5, 1.5, 3.0}) {
                double bmax = std::exp(-t) / p.mu();
                for (double f : {-1.0, -0.5, 0.0, 0.3, 0.7, 1.0}) {
                    for (int x = 0; x <= n; ++x) {
                        double r = harmonicity_residual(p, f * bmax, x, t).relative();
                        s.check(r, [&] { return label("N=%d nu=%g t=%g beta=%g x=%d", n, nu, t, f * bmax, x); });
                    }
                }
            }
        }
    }
    return s.take();
}

SuiteReport krawtchouk_suite()
{
    Suite s("krawtchouk_martingale", 1e-9);
    for (int n : {1, 3, 8, 15, 30}) {
        for (double nu : {0.25, 0.5, 0.8}) {
            auto p = ModelParams::ehrenfest(n, nu);
            for (int k = 0; k <= n; ++k) {
                for (int x = 0; x <= n; ++x) {
                    s.check(krawtchouk_martingale_residual(k, p, x).relative(), [&] {
                        return label("N=%d degree=%d nu=%g x=%d", n, k, nu, x);
                    });
                }
            }
        }
    }
    return s.take();
}

SuiteReport orthogonality_suite()
{
    Suite s("krawtchouk_orthogonality", 1e-10);
    for (int n : {2, 5, 12, 20, 30}) {
        for (double nu : {0.25, 0.5, 0.8}) {
            KrawtchoukBasis basis(n, nu);
            std::vector<std::vector<double>> rows;
            for (int k = 0; k <= n; ++k) {
                rows.push_back(basis.row(k));
            }
            std::vector<double> w(n + 1);
            for (int x = 0; x <= n; ++x) {
                w[x] = std::exp(basis.log_weight(x));
            }
            for (int a = 0; a <= n; ++a) {
                for (int b = a; b <= n; ++b) {
                    double net = 0.0;
                    double mag = 0.0;
                    for (int x = 0; x <= n; ++x) {
                        double t = w[x] * rows[a][x] * rows[b][x];
                        net += t;
                        mag += std::fabs(t);
                    }
                    double metric = a == b ? std::fabs(std::log(net) - basis.log_norm2(a))
                                           : std::fabs(net) / mag;
                    s.check(metric, [&] { return label("N=%d nu=%g degrees %d,%d", n, nu, a, b); });
                }
            }
        }
    }
    return s.take();
}

SuiteReport generating_suite()
{
    Suite s("generating_identity", 1e-10);
    for (int n : {1, 4, 10, 20, 30}) {
        for (double nu : {0.3, 0.5, 0.7}) {
            auto p = ModelParams::ehrenfest(n, nu);
            for (double u : {-1.0, -0.4, 0.25, 0.9}) {
                for (int x = 0; x <= n; ++x) {
                    s.check(generating_identity_residual(x, u, p).relative(), [&] {
                        return label("N=%d nu=%g u=%g x=%d", n, nu, u, x);
                    });
                }
            }
        }
    }
    return s.take();
}

SuiteReport integrated_suite()
{
    Suite s("integrated_martingales", 1e-10);
    for (int n : {2, 6, 15, 25}) {
        for (double nu : {0.3, 0.6}) {
            for (double alpha : {0.2, 1.0, 5.0}) {
                auto e = ModelParams::ehrenfest(n, nu);
                for (int x = 0; x <= n; ++x) {
                    auto describe = [&] { return label("N=%d nu=%g alpha=%g x=%d", n, nu, alpha, x); };
                    s.guarded(
                        [&] {
                            if (x >= 1) {
                                s.check(integrated_residual(IntegratedKind::I, e, alpha, x).relative(), describe);
                            }
                            if (x <= n - 1) {
                                s.check(integrated_residual(IntegratedKind::J, e, alpha, x).relative(), describe);
                            }
                        },
                        describe);
                }
                const int c = (2 * n) / 3;
                if (c < 1 || c >= n) {
                    continue;
                }
                auto g = ModelParams::engset(n, c, nu);
                for (int x = 1; x <= c; ++x) {
                    auto describe = [&] { return label("Engset N=%d C=%d nu=%g alpha=%g x=%d", n, c, nu, alpha, x); };
                    s.guarded(
                        [&] {
                            s.check(integrated_residual(IntegratedKind::K, g, alpha, x).relative(), describe);
                        },
                        describe);
                }
            }
        }
    }
    return s.take();
}

SuiteReport oracle_suite()
{
    Suite s("laplace_vs_resolvent", 1e-8);
    for (int n : {1, 2, 5, 9, 14}) {
        for (double nu : {0.3, 0.6}) {
            for (int c : {n, (n + 1) / 2}) {
                auto p = ModelParams::make(c == n ? ProcessKind::Ehrenfest : ProcessKind::Engset, n, c, nu);
                for (double alpha : {0.1, 1.0, 10.0}) {
                    for (int from = 0; from <= c; ++from) {
                        for (int to = 0; to <= c; ++to) {
                            auto describe = [&] {
                                return label("N=%d C=%d nu=%g alpha=%g %d->%d", n, c, nu, alpha, from, to);
                            };
                            s.guarded(
                                [&] {
                                    LaplaceQuery q{p, from, to, alpha};
                                    double o = resolvent_oracle(q);
                                    s.check(std::fabs(hitting_lt(q) - o) / o, describe);
                                },
                                describe);
                        }
                    }
                }
            }
        }
    }
    return s.take();
}

SuiteReport critical_suite()
{
    Suite s("critical_transform_closed_form", 1e-10);
    for (double nu : {0.3, 0.5, 0.7}) {
        auto law = LimitLaw::critical(nu, 0.0);
        for (double alpha : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            auto describe = [&] { return label("nu=%g alpha=%g", nu, alpha); };
            s.guarded(
                [&] {
                    double c = critical_lt_closed_form(nu, alpha);
                    s.check(std::fabs(law.lt(alpha) - c) / c, describe);
                },
                describe);
        }
    }
    return s.take();
}

} // namespace

std::vector<SuiteReport> run_invariant_suites()
{
    return {generator_suite(),  exp_martingale_suite(), krawtchouk_suite(),
            orthogonality_suite(), generating_suite(),  integrated_suite(),
            oracle_suite(),     critical_suite()};
}

} // namespace engset
