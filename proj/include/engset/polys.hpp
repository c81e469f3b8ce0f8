#pragma once

#include <vector>

#include "engset/model.hpp"
#include "engset/residual.hpp"

namespace engset {

/**
 * Krawtchouk polynomials K_n(x) on 0..N attached to the Ehrenfest process,
 * orthogonal under Binomial(N, nu) and normalized by K_n(0) = 1.
 *
 * Degrees up to kSumDegreeLimit use the alternating binomial sum; higher
 * degrees use the eigenfunction recurrence Q K_n = -n K_n, run forward from
 * K_n(0) = 1 and backward from K_n(N) = (-mu/nu)^n and spliced where the
 * two sweeps agree best (each sweep is unstable past its turning point).
 */
class KrawtchoukBasis {
public:
    static constexpr int kSumDegreeLimit = 12;

    KrawtchoukBasis(int n_particles, double nu);
    explicit KrawtchoukBasis(const ModelParams& p) : KrawtchoukBasis(p.n(), p.nu()) {}

    int n_particles() const { return n_; }
    double ratio() const { return ratio_; }

    double value(int degree, int x) const;
    /// K_degree(x) for x = 0..N.
    std::vector<double> row(int degree) const;

    /// log binom(N,x) nu^x mu^(N-x).
    double log_weight(int x) const;
    /// Squared norm sum_x w(x) K_n(x)^2 = (mu/nu)^n / binom(N,n).
    double log_norm2(int degree) const;

    /// Alternating-sum form, any degree; accurate only while the sum does
    /// not cancel badly (small degrees).
    double alternating_sum(int degree, int x) const;
    std::vector<double> recurrence_row(int degree) const;

private:
    int n_;
    double nu_;
    double mu_;
    double ratio_; // mu / nu
};

double krawtchouk(int degree, int x, const ModelParams& p);

/// |sum_n binom(N,n) K_n(x) u^n - (1+u)^(N-x) (1 - (mu/nu) u)^x|.
Residual generating_identity_residual(int x, double u, const ModelParams& p);

/// |n K_n(x) + (Q K_n)(x)|: harmonicity of (x,t) -> K_n(x) e^{nt}.
Residual krawtchouk_martingale_residual(int degree, const ModelParams& p, int x);

} // namespace engset
