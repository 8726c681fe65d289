#include <ssvm/subsolvers.hpp>
#include <algorithm>
#include <limits>

namespace ssvm {

Vector update_beta_prox(const BlockContext& ctx, const Vector& beta, const Vector& Abeta)
{
    if (!(ctx.eta > 0.0)) throw std::invalid_argument("update_beta_prox: eta_g is not set");
    const double step = ctx.phi / ctx.eta;
    const double scale = ctx.lambda / ctx.eta;
    const Vector grad = ctx.A.transpose() * (Abeta - ctx.target);
    Vector out(beta.size());
    for (Index j = 0; j < beta.size(); ++j) {
        out[j] = soft_threshold(beta[j] - step * grad[j], ctx.alpha[j] * scale);
    }
    return out;
}

int update_beta_cd(const BlockContext& ctx, Vector& beta, int sweeps, double inner_tol)
{
    const Index pg = beta.size();
    Vector r = ctx.target;
    for (Index j = 0; j < pg; ++j) {
        if (beta[j] != 0.0) r.noalias() -= beta[j] * ctx.A.col(j);
    }
    auto visit = [&](Index j) {
        const double nrm = ctx.col_sq_norms[j];
        if (nrm <= 0.0) {
            beta[j] = 0.0;
            return 0.0;
        }
        const double old = beta[j];
        const double a = old + ctx.A.col(j).dot(r) / nrm;
        const double b = soft_threshold(a, ctx.lambda * ctx.alpha[j] / (ctx.phi * nrm));
        const double delta = b - old;
        if (delta == 0.0) return 0.0;
        r.noalias() -= delta * ctx.A.col(j);
        beta[j] = b;
        return std::abs(delta);
    };

    // Pass 1 is over the whole block; later passes cover only the nonzero
    // coordinates until those settle, which triggers another full pass.
    std::vector<Index> active;
    bool full = true;
    int pass = 0;
    while (pass < sweeps) {
        ++pass;
        double max_move = 0.0;
        if (full) {
            for (Index j = 0; j < pg; ++j) max_move = std::max(max_move, visit(j));
            if (max_move < inner_tol) break;
            active.clear();
            for (Index j = 0; j < pg; ++j) {
                if (beta[j] != 0.0) active.push_back(j);
            }
            full = active.empty();
        } else {
            for (const Index j : active) max_move = std::max(max_move, visit(j));
            full = max_move < inner_tol;
        }
    }
    return pass;
}

double block_subproblem_value(const BlockContext& ctx, const Vector& beta)
{
    return ctx.lambda * ctx.alpha.cwiseProduct(beta.cwiseAbs()).sum() +
           0.5 * ctx.phi * (ctx.A * beta - ctx.target).squaredNorm();
}

double largest_gram_eigenvalue(const Matrix& A, int max_iter)
{
    const Index p = A.cols();
    if (p == 0 || A.squaredNorm() == 0.0) return 0.0;
    // Deterministic start with distinct entries so it is not orthogonal to the
    // leading eigenvector for structured inputs.
    Vector x(p);
    for (Index j = 0; j < p; ++j) x[j] = 1.0 + static_cast<double>(j) / static_cast<double>(p);
    x.normalize();
    double rq = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Vector Ax = A * x;
        Vector y = A.transpose() * Ax;
        const double next = Ax.squaredNorm();  // x^T A^T A x with ||x|| = 1
        const double norm = y.norm();
        if (norm == 0.0) return next;
        x = y / norm;
        if (it > 0 && std::abs(next - rq) <= 1e-8 * std::abs(next)) {
            rq = next;
            break;
        }
        rq = next;
    }
    return (A * x).squaredNorm();
}

double estimate_eta(const Matrix& A, double phi, double safety)
{
    const double floor = std::numeric_limits<double>::epsilon();
    return safety * phi * std::max(largest_gram_eigenvalue(A), floor);
}

}  // namespace ssvm
