#pragma once

#include "engset/model.hpp"
#include "engset/residual.hpp"
#include "engset/signed_log.hpp"

namespace engset {

// Times and alpha in this header are in model units (nu + mu = 1).

/// h(x,t) = (1 - beta mu e^t)^x (1 + beta nu e^t)^(N-x), any real beta.
SignedLog exp_martingale_value(const ModelParams& p, double beta, int x, double t);

/// |dh/dt + (Q h)(x)| with the time derivative taken analytically. Requires
/// the unreflected process.
Residual harmonicity_residual(const ModelParams& p, double beta, int x, double t);

/// Same check with a central difference in time.
Residual harmonicity_residual_fd(const ModelParams& p, double beta, int x, double t,
                                 double step = 1e-6);

/// I(x,t) = e^{-alpha t} B_x(alpha), J(x,t) = e^{-alpha t} D_x(alpha).
double integrated_log_I(const ModelParams& p, double alpha, int x, double t);
double integrated_log_J(const ModelParams& p, double alpha, int x, double t);
double integrated_I(const ModelParams& p, double alpha, int x, double t);
double integrated_J(const ModelParams& p, double alpha, int x, double t);

/**
 * I and J obtained the other way round: integrating h over beta,
 *   I = mu^alpha \int_0^{e^{-t}/mu} h_beta(x,t) beta^{alpha-1} d beta,
 *   J = nu^alpha \int_0^{e^{-t}/nu} h_{-beta}(x,t) beta^{alpha-1} d beta.
 */
double integrated_log_I_over_beta(const ModelParams& p, double alpha, int x, double t);
double integrated_log_J_over_beta(const ModelParams& p, double alpha, int x, double t);

/// K(x,t) = d I(x,t) + b J(x,t) for a reflected Engset process (C < N).
double engset_log_K(const ModelParams& p, double alpha, int x, double t);
double engset_K_value(const ModelParams& p, double alpha, int x, double t);

enum class IntegratedKind { I, J, K };

/**
 * |-alpha F(x) + (Q F)(x)| for F = B, D or d B + b D under the generator of
 * p (reflected at C for the Engset process). Time-independent up to the
 * common factor e^{-alpha t}.
 */
Residual integrated_residual(IntegratedKind kind, const ModelParams& p, double alpha, int x);

} // namespace engset
