#include <ssvm/lp_oracle.hpp>
#include <cmath>
#include <limits>

namespace ssvm {

StandardLP build_lp(const Dataset& data, const PenaltyWeights& w, double lambda)
{
    const Index n = data.n();
    const Index p = data.p();
    if (w.size() != p) throw std::invalid_argument("build_lp: weights do not match the dataset");
    if (n + 2 * p + 2 > lp_size_guard) {
        throw lp_error("instance has " + std::to_string(n + 2 * p + 2) + " LP variables; the oracle accepts at most " +
                       std::to_string(lp_size_guard));
    }
    StandardLP lp;
    lp.n = n;
    lp.p = p;
    const Index d = n + 2 * p + 2;
    lp.c = Vector::Zero(d);
    lp.c.head(n).setConstant(1.0 / static_cast<double>(n));
    lp.c.segment(lp.u_offset(), p) = lambda * w.values();
    lp.c.segment(lp.v_offset(), p) = lambda * w.values();

    lp.M = Matrix::Zero(n, d);
    lp.M.leftCols(n).setIdentity();
    const Matrix signed_x = data.y().asDiagonal() * data.X();
    lp.M.middleCols(lp.u_offset(), p) = signed_x;
    lp.M.middleCols(lp.v_offset(), p) = -signed_x;
    lp.M.col(lp.bplus_index()) = data.y();
    lp.M.col(lp.bminus_index()) = -data.y();
    lp.b = Vector::Ones(n);
    return lp;
}

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double cost_eps = 1e-10;
constexpr double pivot_eps = 1e-11;

class Simplex {
public:
    Simplex(const StandardLP& lp, long max_pivots) : d_(lp.variables()), m_(lp.constraints()), max_pivots_(max_pivots)
    {
        if (lp.M.cols() != d_ || lp.b.size() != m_) throw std::invalid_argument("simplex: inconsistent dimensions");
        if (!lp.b.allFinite() || !lp.M.allFinite() || !lp.c.allFinite()) throw std::invalid_argument("simplex: non-finite data");
        cols_ = d_ + 2 * m_;
        T_ = Tableau::Zero(m_, cols_ + 1);
        basis_.resize(m_);
        for (Index i = 0; i < m_; ++i) {
            const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
            T_.row(i).head(d_) = sign * lp.M.row(i);
            T_(i, d_ + i) = -sign;
            T_(i, d_ + m_ + i) = 1.0;
            T_(i, cols_) = sign * lp.b[i];
            basis_[i] = d_ + m_ + i;
        }
        cost_ = Vector::Zero(cols_);
    }

    LpSolution solve(const Vector& c)
    {
        // Phase one: drive the artificial variables to zero.
        cost_.setZero();
        cost_.tail(m_).setOnes();
        run(cols_);
        const double infeasibility = value();
        if (infeasibility > 1e-9 * std::max(1.0, T_.col(cols_).cwiseAbs().maxCoeff())) {
            throw lp_error("linear program is infeasible");
        }
        for (Index i = 0; i < m_; ++i) {
            if (basis_[i] < d_ + m_) continue;
            for (Index j = 0; j < d_ + m_; ++j) {
                if (std::abs(T_(i, j)) > 1e-9) {
                    pivot(i, j);
                    break;
                }
            }
        }

        // Phase two on the original costs; artificial columns may no longer enter.
        cost_.setZero();
        cost_.head(d_) = c;
        run(d_ + m_);

        LpSolution sol;
        sol.w = Vector::Zero(d_);
        for (Index i = 0; i < m_; ++i) {
            if (basis_[i] < d_) sol.w[basis_[i]] = std::max(T_(i, cols_), 0.0);
        }
        sol.value = c.dot(sol.w);
        sol.basis = basis_;
        sol.pivots = pivots_;
        return sol;
    }

private:
    double value() const
    {
        double v = 0.0;
        for (Index i = 0; i < m_; ++i) v += cost_[basis_[i]] * T_(i, cols_);
        return v;
    }

    void run(Index allowed)
    {
        while (true) {
            // reduced costs r_j = c_j - c_B^T column_j
            Vector cb(m_);
            for (Index i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
            Index enter = -1;
            for (Index j = 0; j < allowed; ++j) {
                const double r = cost_[j] - cb.dot(T_.col(j));
                if (r < -cost_eps) {
                    enter = j;  // Bland: lowest index
                    break;
                }
            }
            if (enter < 0) return;

            Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < m_; ++i) {
                const double a = T_(i, enter);
                if (a <= pivot_eps) continue;
                const double ratio = T_(i, cols_) / a;
                if (leave < 0) {
                    best_ratio = ratio;
                    leave = i;
                    continue;
                }
                const double tie = 1e-12 * std::max(1.0, std::abs(best_ratio));
                if (ratio < best_ratio - tie || (std::abs(ratio - best_ratio) <= tie && basis_[i] < basis_[leave])) {
                    best_ratio = std::min(ratio, best_ratio);
                    leave = i;
                }
            }
            if (leave < 0) throw lp_error("linear program is unbounded");
            pivot(leave, enter);
        }
    }

    void pivot(Index r, Index e)
    {
        if (++pivots_ > max_pivots_) throw lp_error("simplex pivot limit exceeded");
        T_.row(r) /= T_(r, e);
        for (Index i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = T_(i, e);
            if (f != 0.0) T_.row(i) -= f * T_.row(r);
        }
        basis_[r] = e;
    }

    Index d_, m_, cols_ = 0;
    long max_pivots_;
    long pivots_ = 0;
    Tableau T_;
    Vector cost_;
    std::vector<Index> basis_;
};

}  // namespace

LpSolution simplex_solve(const StandardLP& lp, long max_pivots)
{
    Simplex s(lp, max_pivots);
    return s.solve(lp.c);
}

FitResult oracle_fit(const Dataset& data, const PenaltyWeights& w, double lambda, double support_eps)
{
    const StandardLP lp = build_lp(data, w, lambda);
    const LpSolution sol = simplex_solve(lp);
    FitResult fit;
    fit.lambda = lambda;
    fit.beta_plus = sol.w.segment(lp.u_offset(), lp.p) - sol.w.segment(lp.v_offset(), lp.p);
    fit.beta0 = sol.w[lp.bplus_index()] - sol.w[lp.bminus_index()];
    fit.iterations = static_cast<int>(sol.pivots);
    fit.converged = true;
    fit.objective = objective(data, w, lambda, fit.beta0, fit.beta_plus);
    if (std::abs(fit.objective - sol.value) > 1e-9 * std::max(1.0, std::abs(sol.value))) {
        throw lp_error("LP value " + std::to_string(sol.value) + " disagrees with the recomputed objective " +
                       std::to_string(fit.objective));
    }
    fit.support = support_of(fit.beta_plus, support_eps);
    return fit;
}

}  // namespace ssvm
