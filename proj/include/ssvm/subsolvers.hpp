#pragma once
#include <ssvm/data.hpp>
#include <cmath>

namespace ssvm {

/// S(a, kappa) = sign(a) max(|a| - kappa, 0).
inline double soft_threshold(double a, double kappa)
{
    if (a > kappa) return a - kappa;
    if (a < -kappa) return a + kappa;
    return 0.0;
}

/**
 * Everything one beta-block update needs. The subproblem is
 *
 *      minimize  lambda * ||alpha_g o beta_g||_1 + (phi/2) ||A_g beta_g - target||^2
 *
 * where target = omega_g - gamma_g / phi.
 */
struct BlockContext {
    const Matrix& A;
    const Vector& col_sq_norms;
    Eigen::Ref<const Vector> alpha;
    const Vector& target;
    double lambda;
    double phi;
    /// Proximal constant eta_g; required by the prox variant only.
    double eta = 0.0;
};

/**
 * One linearized proximal step:
 *      beta_j <- S(beta_j - (phi/eta) a_j^T (A beta - target), alpha_j lambda / eta).
 * `Abeta` must hold A * beta on entry.
 */
Vector update_beta_prox(const BlockContext& ctx, const Vector& beta, const Vector& Abeta);

/**
 * Cyclic coordinate descent on the block subproblem, warm-started at `beta`.
 * Keeps the residual r = target - A beta up to date. Zero columns are pinned at 0.
 *
 * A full pass over the block is followed by passes over its nonzero
 * coordinates only; once those move less than `inner_tol` another full pass
 * runs. Stops when a full pass moves every coordinate by less than
 * `inner_tol`, or after `sweeps` passes of either kind. Returns the number
 * of passes made.
 */
int update_beta_cd(const BlockContext& ctx, Vector& beta, int sweeps, double inner_tol);

/// Block subproblem value lambda ||alpha o beta||_1 + (phi/2)||A beta - target||^2.
double block_subproblem_value(const BlockContext& ctx, const Vector& beta);

/**
 * Largest eigenvalue of A^T A by power iteration on x -> A^T (A x).
 * Stops when the Rayleigh quotient changes by less than 1e-8 relative, or
 * after `max_iter` rounds. Returns 0 for an all-zero matrix.
 */
double largest_gram_eigenvalue(const Matrix& A, int max_iter = 200);

/// safety * phi * lambda_max(A^T A), floored at safety * phi * machine epsilon.
double estimate_eta(const Matrix& A, double phi, double safety);

}  // namespace ssvm
