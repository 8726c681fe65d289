#pragma once
#include <ssvm/data.hpp>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ssvm {

/// The engine produced a non-finite value.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, int iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

/**
 * Primal and dual iterates of the 3-block splitting
 *
 *      minimize   sum_g lambda ||alpha_g o beta_g||_1 + (1/n) 1^T (z)_+
 *      subject to z + sum_g omega_g + A0 beta0 = 1,   A_g beta_g = omega_g,
 *
 * with gamma0 the multiplier of the first constraint and gamma[g] of the rest.
 * Abeta[g] caches A_g beta[g].
 */
struct AdmmState {
    double beta0 = 0.0;
    std::vector<Vector> beta;
    Vector z;
    std::vector<Vector> omega;
    Vector gamma0;
    std::vector<Vector> gamma;
    std::vector<Vector> Abeta;
    int iter = 0;

    /// Cold start: every variable zero.
    static AdmmState zeros(const SignedDesign& design);

    bool conforms(const SignedDesign& design) const;
    Vector beta_plus() const;
    Vector omega_sum() const;
    Vector Abeta_sum() const;
};

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
};

struct FitResult {
    double beta0 = 0.0;
    Vector beta_plus;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    std::vector<Residuals> residual_history;
    /// Objective at each iteration; filled only when FitOptions::record_objective is set.
    std::vector<double> objective_history;
    std::vector<Index> support;
};

/// Subset of an iterate needed for the linear-rate diagnostic.
struct Snapshot {
    int iter = 0;
    double beta0 = 0.0;
    std::vector<Vector> beta;
    Vector z;
    Vector z_prev;
};

/// Bounded snapshot store; once full the oldest snapshot is dropped.
class Trajectory {
public:
    explicit Trajectory(std::size_t capacity = 500) : capacity_(capacity) {}
    void push(Snapshot s);
    const std::deque<Snapshot>& snapshots() const { return snapshots_; }
    bool empty() const { return snapshots_.empty(); }
    std::size_t size() const { return snapshots_.size(); }

private:
    std::size_t capacity_;
    std::deque<Snapshot> snapshots_;
};

struct FitOptions {
    /// Called with the state after every completed iteration.
    std::function<void(const AdmmState&)> on_iteration;
    /// Receives a snapshot every cfg.snapshot_interval iterations (and the last one).
    Trajectory* trajectory = nullptr;
    bool record_objective = false;
    /**
     * When set, called at the start of every iteration to supply the penalty
     * weights for that iteration instead of the fixed `w`. The result's
     * objective then uses the last weights supplied.
     */
    std::function<Vector(const AdmmState&)> reweight;
    /// Ignore the residual stopping rule and run exactly max_iter iterations.
    bool run_to_max_iter = false;
};

/**
 * Weighted l1 SVM by symmetric Gauss-Seidel semi-proximal ADMM.
 *
 * Each iteration performs, in order: beta0 and beta_g (parallel over blocks,
 * coordinate descent or one proximal step per cfg.variant), omega at z^k,
 * z, omega at z^{k+1}, and the multiplier ascent. `state` is the starting
 * point on entry and holds the final iterate on return so that it can seed
 * the next fit.
 *
 * Reaching max_iter is not an error: the result carries converged = false and
 * the coefficients of the lowest-objective iterate seen.
 *
 * A cold start with balanced labels at a penalty where the zero slope is
 * optimal (lambda alpha_j >= |(1/n) sum_i y_i x_ij| for all j) begins at that
 * optimal primal-dual point instead of all zeros, so the zero solution is
 * returned even at lambda_max where other minimizers exist.
 *
 * @throws solver_error when an iterate becomes non-finite.
 */
FitResult fit_weighted_l1_svm(const SignedDesign& design, const PenaltyWeights& w, double lambda,
                              const SolverConfig& cfg, AdmmState& state,
                              const FitOptions& options = {});

/// Cold-start convenience overload.
FitResult fit_weighted_l1_svm(const SignedDesign& design, const PenaltyWeights& w, double lambda,
                              const SolverConfig& cfg);

// Individual phases, exposed for testing. All read the current `state`.

/// beta0 <- (1/n) y^T (1 - z - sum_g omega_g - gamma0 / phi).
double update_intercept(const AdmmState& state, const SignedDesign& design, double phi);

/// Prox of u -> (1/(n phi)) (u)_+ at v: (v - t)_+ - (v)_- with t = 1/(n phi).
inline double hinge_prox(double v, double threshold)
{
    if (v > threshold) return v - threshold;
    if (v < 0.0) return v;
    return 0.0;
}

/// z <- prox at v = 1 - y beta0 - sum_g omega_g - gamma0 / phi.
Vector update_z(const AdmmState& state, const SignedDesign& design, double phi);

/**
 * Exact minimizer of the augmented Lagrangian over all omega_g jointly at the
 * current beta, beta0, z and multipliers:
 *      c = (D + sum_g A_g beta_g - sum_g (gamma0 - gamma_g)/phi) / (G + 1),
 *      omega_g = A_g beta_g - (gamma0 - gamma_g)/phi - c,
 * with D = y beta0 + z - 1.
 */
std::vector<Vector> update_omega(const AdmmState& state, const SignedDesign& design, double phi);

/// gamma0 += theta phi r1 and gamma_g += theta phi (A_g beta_g - omega_g).
void update_multipliers(AdmmState& state, const SignedDesign& design, double theta, double phi);

/// r1 = y beta0 + z + sum_g omega_g - 1.
Vector coupling_residual(const AdmmState& state, const SignedDesign& design);

/**
 * primal = max(||r1||, max_g ||A_g beta_g - omega_g||) / sqrt(n)
 * dual   = phi max(||z - z_prev||, max_g ||omega_g - omega_prev_g||) / sqrt(n)
 */
Residuals residuals(const AdmmState& state, const SignedDesign& design, const Vector& z_prev,
                    const std::vector<Vector>& omega_prev, double phi);

/// m1 = 1 + d1 - d1 theta - (1 - d1) min(theta, 1/theta).
double dist_m1(double theta, double d1);

/**
 * Linear-rate potential of every snapshot against `reference` (normally the
 * converged iterate). Block g = 0 is the intercept with A0 = y and no proximal
 * term; blocks g >= 1 use T_g = eta_g I - phi A_g^T A_g with eta_g from
 * estimate_eta. The seminorm sum is counted twice.
 *
 * @throws std::invalid_argument on an empty trajectory.
 */
std::vector<double> dist_monitor(const Trajectory& trajectory, const AdmmState& reference,
                                 const SignedDesign& design, const SolverConfig& cfg,
                                 double d1 = 0.25);

/// Indices j with |beta_j| > eps.
std::vector<Index> support_of(const Vector& beta_plus, double eps);

}  // namespace ssvm
