#include <ssvm/admm.hpp>
#include <ssvm/subsolvers.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ssvm {
namespace {

/// A_g beta_g, touching only the nonzero coefficients.
Vector sparse_product(const Matrix& A, const Vector& beta)
{
    Vector out = Vector::Zero(A.rows());
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) out.noalias() += beta[j] * A.col(j);
    }
    return out;
}

double current_objective(const AdmmState& s, const SignedDesign& design, const Vector& alpha,
                         double lambda)
{
    Vector margins = design.a0() * s.beta0;
    double penalty = 0.0;
    for (Index g = 0; g < design.blocks(); ++g) {
        margins += s.Abeta[g];
        penalty += alpha.segment(design.partition().begin(g), design.partition().size(g))
                       .cwiseProduct(s.beta[g].cwiseAbs())
                       .sum();
    }
    return hinge_sum(margins) / static_cast<double>(design.n()) + lambda * penalty;
}

Snapshot take_snapshot(const AdmmState& s, const Vector& z_prev)
{
    return Snapshot{s.iter, s.beta0, s.beta, s.z, z_prev};
}

bool all_zero(const AdmmState& s)
{
    auto zero = [](const Vector& v) { return (v.array() == 0.0).all(); };
    if (s.beta0 != 0.0 || !zero(s.z) || !zero(s.gamma0)) return false;
    for (std::size_t g = 0; g < s.beta.size(); ++g) {
        if (!zero(s.beta[g]) || !zero(s.omega[g]) || !zero(s.gamma[g])) return false;
    }
    return true;
}

// With balanced labels, beta = 0, beta0 = 0 and every hinge subgradient equal
// to one is a KKT point whenever lambda alpha_j >= |(1/n) sum_i y_i x_ij|.
bool null_model_certified(const SignedDesign& design, const PenaltyWeights& w, double lambda,
                          const AdmmState& state)
{
    if (design.a0().sum() != 0.0 || !all_zero(state)) return false;
    const double n = static_cast<double>(design.n());
    const auto& part = design.partition();
    for (Index g = 0; g < design.blocks(); ++g) {
        const Vector sums = design.block(g).colwise().sum().transpose();
        for (Index j = 0; j < sums.size(); ++j) {
            if (std::abs(sums[j]) / n > lambda * w[part.begin(g) + j]) return false;
        }
    }
    return true;
}

// Primal-dual point of the certified null model: z = 1, gamma = -1/n.
void start_at_null_model(const SignedDesign& design, AdmmState& state)
{
    const Index n = design.n();
    state.z = Vector::Ones(n);
    state.gamma0 = Vector::Constant(n, -1.0 / static_cast<double>(n));
    for (auto& g : state.gamma) g = state.gamma0;
}

}  // namespace

AdmmState AdmmState::zeros(const SignedDesign& design)
{
    const Index n = design.n();
    const Index G = design.blocks();
    AdmmState s;
    s.z = Vector::Zero(n);
    s.gamma0 = Vector::Zero(n);
    for (Index g = 0; g < G; ++g) {
        s.beta.push_back(Vector::Zero(design.partition().size(g)));
        s.omega.push_back(Vector::Zero(n));
        s.gamma.push_back(Vector::Zero(n));
        s.Abeta.push_back(Vector::Zero(n));
    }
    return s;
}

bool AdmmState::conforms(const SignedDesign& design) const
{
    const Index n = design.n();
    const auto G = static_cast<std::size_t>(design.blocks());
    if (z.size() != n || gamma0.size() != n) return false;
    if (beta.size() != G || omega.size() != G || gamma.size() != G || Abeta.size() != G) return false;
    for (std::size_t g = 0; g < G; ++g) {
        if (beta[g].size() != design.partition().size(static_cast<Index>(g))) return false;
        if (omega[g].size() != n || gamma[g].size() != n || Abeta[g].size() != n) return false;
    }
    return true;
}

Vector AdmmState::beta_plus() const
{
    Index p = 0;
    for (const auto& b : beta) p += b.size();
    Vector out(p);
    Index off = 0;
    for (const auto& b : beta) {
        out.segment(off, b.size()) = b;
        off += b.size();
    }
    return out;
}

Vector AdmmState::omega_sum() const
{
    Vector s = Vector::Zero(z.size());
    for (const auto& w : omega) s += w;
    return s;
}

Vector AdmmState::Abeta_sum() const
{
    Vector s = Vector::Zero(z.size());
    for (const auto& a : Abeta) s += a;
    return s;
}

void Trajectory::push(Snapshot s)
{
    if (capacity_ == 0) return;
    if (snapshots_.size() == capacity_) snapshots_.pop_front();
    snapshots_.push_back(std::move(s));
}

double update_intercept(const AdmmState& state, const SignedDesign& design, double phi)
{
    const Vector& y = design.a0();
    const Vector rhs = Vector::Ones(design.n()) - state.z - state.omega_sum() - state.gamma0 / phi;
    return y.dot(rhs) / y.squaredNorm();
}

Vector update_z(const AdmmState& state, const SignedDesign& design, double phi)
{
    const Index n = design.n();
    const double threshold = 1.0 / (static_cast<double>(n) * phi);
    const Vector v = Vector::Ones(n) - design.a0() * state.beta0 - state.omega_sum() - state.gamma0 / phi;
    Vector z(n);
    for (Index i = 0; i < n; ++i) z[i] = hinge_prox(v[i], threshold);
    return z;
}

std::vector<Vector> update_omega(const AdmmState& state, const SignedDesign& design, double phi)
{
    const Index n = design.n();
    const Index G = design.blocks();
    Vector c = design.a0() * state.beta0 + state.z - Vector::Ones(n);
    for (Index g = 0; g < G; ++g) c += state.Abeta[g] - (state.gamma0 - state.gamma[g]) / phi;
    c /= static_cast<double>(G + 1);
    std::vector<Vector> omega(G);
    for (Index g = 0; g < G; ++g) omega[g] = state.Abeta[g] - (state.gamma0 - state.gamma[g]) / phi - c;
    return omega;
}

Vector coupling_residual(const AdmmState& state, const SignedDesign& design)
{
    return design.a0() * state.beta0 + state.z + state.omega_sum() - Vector::Ones(design.n());
}

void update_multipliers(AdmmState& state, const SignedDesign& design, double theta, double phi)
{
    const double step = theta * phi;
    state.gamma0 += step * coupling_residual(state, design);
    for (Index g = 0; g < design.blocks(); ++g) state.gamma[g] += step * (state.Abeta[g] - state.omega[g]);
}

Residuals residuals(const AdmmState& state, const SignedDesign& design, const Vector& z_prev,
                    const std::vector<Vector>& omega_prev, double phi)
{
    const double root_n = std::sqrt(static_cast<double>(design.n()));
    double primal = coupling_residual(state, design).norm();
    double dual = (state.z - z_prev).norm();
    for (Index g = 0; g < design.blocks(); ++g) {
        primal = std::max(primal, (state.Abeta[g] - state.omega[g]).norm());
        dual = std::max(dual, (state.omega[g] - omega_prev[g]).norm());
    }
    return {primal / root_n, phi * dual / root_n};
}

std::vector<Index> support_of(const Vector& beta_plus, double eps)
{
    std::vector<Index> s;
    for (Index j = 0; j < beta_plus.size(); ++j) {
        if (std::abs(beta_plus[j]) > eps) s.push_back(j);
    }
    return s;
}

FitResult fit_weighted_l1_svm(const SignedDesign& design, const PenaltyWeights& w, double lambda,
                              const SolverConfig& cfg, AdmmState& state, const FitOptions& options)
{
    cfg.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive and finite");
    if (w.size() != design.p()) throw std::invalid_argument("penalty weights do not match the design width");
    if (!state.conforms(design)) throw std::invalid_argument("initial state does not conform to the design");

    const Index G = design.blocks();
    const double phi = cfg.phi;
    const auto& part = design.partition();

    std::vector<double> eta(G, 0.0);
    if (cfg.variant == BetaVariant::prox) {
        for (Index g = 0; g < G; ++g) {
            eta[g] = cfg.eta_safety * phi *
                     std::max(design.block_spectral(g), std::numeric_limits<double>::epsilon());
        }
    }

    if (!options.reweight && state.iter == 0 && null_model_certified(design, w, lambda, state)) {
        start_at_null_model(design, state);
    }

    FitResult result;
    result.lambda = lambda;
    result.residual_history.reserve(std::min(cfg.max_iter, 4096));

    double best_obj = std::numeric_limits<double>::infinity();
    double best_beta0 = state.beta0;
    Vector best_beta = state.beta_plus();

    Vector z_prev;
    std::vector<Vector> omega_prev;
    std::vector<Vector> targets(G);
    Vector alpha = w.values();

    for (int k = 0; k < cfg.max_iter; ++k) {
        z_prev = state.z;
        omega_prev = state.omega;
        if (options.reweight) {
            alpha = options.reweight(state);
            if (alpha.size() != design.p() || !alpha.allFinite() || (alpha.array() < 0.0).any()) {
                throw std::invalid_argument("reweight produced invalid penalty weights");
            }
        }

        const double beta0_next = update_intercept(state, design, phi);
        for (Index g = 0; g < G; ++g) targets[g] = state.omega[g] - state.gamma[g] / phi;

#pragma omp parallel for schedule(static) if (G > 1)
        for (Index g = 0; g < G; ++g) {
            const BlockContext ctx{design.block(g), design.col_sq_norms(g),
                                   alpha.segment(part.begin(g), part.size(g)), targets[g], lambda, phi, eta[g]};
            if (cfg.variant == BetaVariant::cd) {
                update_beta_cd(ctx, state.beta[g], cfg.inner_sweeps, cfg.inner_tol);
            } else {
                state.beta[g] = update_beta_prox(ctx, state.beta[g], state.Abeta[g]);
            }
            state.Abeta[g] = sparse_product(design.block(g), state.beta[g]);
        }
        state.beta0 = beta0_next;

        state.omega = update_omega(state, design, phi);  // omega^{k+1/2}, uses z^k
        state.z = update_z(state, design, phi);
        state.omega = update_omega(state, design, phi);  // omega^{k+1}, uses z^{k+1}
        update_multipliers(state, design, cfg.theta, phi);
        ++state.iter;

        const Residuals res = residuals(state, design, z_prev, omega_prev, phi);
        if (!std::isfinite(res.primal) || !std::isfinite(res.dual) || !std::isfinite(state.beta0) ||
            !state.gamma0.allFinite()) {
            throw solver_error("non-finite iterate at iteration " + std::to_string(k + 1), k + 1);
        }
        result.residual_history.push_back(res);
        result.iterations = k + 1;

        const double obj = current_objective(state, design, alpha, lambda);
        if (options.record_objective) result.objective_history.push_back(obj);
        if (obj < best_obj) {
            best_obj = obj;
            best_beta0 = state.beta0;
            best_beta = state.beta_plus();
        }

        if (options.on_iteration) options.on_iteration(state);

        const bool done = !options.run_to_max_iter && res.primal <= cfg.tol && res.dual <= cfg.tol;
        const bool last = done || k + 1 == cfg.max_iter;
        if (options.trajectory && ((k + 1) % cfg.snapshot_interval == 0 || last)) {
            options.trajectory->push(take_snapshot(state, z_prev));
        }
        if (done) {
            result.converged = true;
            break;
        }
    }

    if (result.converged || options.run_to_max_iter || options.reweight) {
        result.beta0 = state.beta0;
        result.beta_plus = state.beta_plus();
    } else {
        result.beta0 = best_beta0;
        result.beta_plus = std::move(best_beta);
    }
    result.objective = objective(design, PenaltyWeights(alpha), lambda, result.beta0, result.beta_plus);
    result.support = support_of(result.beta_plus, cfg.support_eps);
    return result;
}

FitResult fit_weighted_l1_svm(const SignedDesign& design, const PenaltyWeights& w, double lambda,
                              const SolverConfig& cfg)
{
    AdmmState state = AdmmState::zeros(design);
    return fit_weighted_l1_svm(design, w, lambda, cfg, state);
}

double dist_m1(double theta, double d1)
{
    return 1.0 + d1 - d1 * theta - (1.0 - d1) * std::min(theta, 1.0 / theta);
}

std::vector<double> dist_monitor(const Trajectory& trajectory, const AdmmState& reference,
                                 const SignedDesign& design, const SolverConfig& cfg, double d1)
{
    if (trajectory.empty()) throw std::invalid_argument("dist_monitor: empty trajectory");
    if (!reference.conforms(design)) throw std::invalid_argument("dist_monitor: reference does not conform");

    const Index G = design.blocks();
    const double phi = cfg.phi;
    const double m1 = dist_m1(cfg.theta, d1);
    const double inv_blocks = 1.0 / static_cast<double>(G + 1);

    std::vector<double> eta(G);
    for (Index g = 0; g < G; ++g) {
        eta[g] = cfg.eta_safety * phi * std::max(design.block_spectral(g), std::numeric_limits<double>::epsilon());
    }

    std::vector<double> out;
    out.reserve(trajectory.size());
    std::vector<Vector> u(G + 1);
    for (const auto& s : trajectory.snapshots()) {
        if (s.beta.size() != static_cast<std::size_t>(G)) throw std::invalid_argument("dist_monitor: snapshot shape");
        double seminorm = 0.0;  // intercept block carries no proximal term
        u[0] = design.a0() * (s.beta0 - reference.beta0);
        Vector total = u[0];
        for (Index g = 0; g < G; ++g) {
            const Vector d = s.beta[g] - reference.beta[g];
            u[g + 1] = design.block(g) * d;
            total += u[g + 1];
            seminorm += eta[g] * d.squaredNorm() - phi * u[g + 1].squaredNorm();
        }
        double dist = 0.0;
        for (Index g = 0; g <= G; ++g) dist += (u[g] - inv_blocks * total).squaredNorm();
        dist += 2.0 * seminorm;
        const Vector dz = s.z - reference.z;
        dist += dz.squaredNorm();
        dist += static_cast<double>(G) * inv_blocks * (s.z - s.z_prev).squaredNorm();
        dist += m1 * inv_blocks * (total + dz).squaredNorm();
        out.push_back(dist);
    }
    return out;
}

}  // namespace ssvm
