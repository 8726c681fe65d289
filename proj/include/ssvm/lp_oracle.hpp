#pragma once
#include <ssvm/admm.hpp>
#include <stdexcept>
#include <vector>

namespace ssvm {

/// The simplex method could not produce an optimum.
class lp_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// minimize c^T w subject to M w >= b, w >= 0.
struct StandardLP {
    Vector c;
    Matrix M;
    Vector b;

    // Column layout for the SVM program: [xi (n) | u (p) | v (p) | b+ | b-].
    Index n = 0;
    Index p = 0;
    Index xi_offset() const { return 0; }
    Index u_offset() const { return n; }
    Index v_offset() const { return n + p; }
    Index bplus_index() const { return n + 2 * p; }
    Index bminus_index() const { return n + 2 * p + 1; }

    Index variables() const { return c.size(); }
    Index constraints() const { return M.rows(); }
};

/// Largest variable count build_lp accepts.
inline constexpr Index lp_size_guard = 400;

/**
 * minimize (1/n) sum xi + lambda sum alpha_j (u_j + v_j)
 * s.t. xi_i + y_i x_i^T (u - v) + y_i (b+ - b-) >= 1, everything >= 0.
 * @throws lp_error when n + 2p + 2 exceeds lp_size_guard.
 */
StandardLP build_lp(const Dataset& data, const PenaltyWeights& w, double lambda);

struct LpSolution {
    Vector w;
    double value = 0.0;
    std::vector<Index> basis;
    long pivots = 0;
};

/**
 * Dense two-phase tableau simplex with Bland's rule.
 * @throws lp_error if the program is infeasible, unbounded, or the pivot cap is hit.
 */
LpSolution simplex_solve(const StandardLP& lp, long max_pivots = 1'000'000);

/**
 * Exact l1-SVM fit through build_lp + simplex_solve. The objective is
 * recomputed from the mapped-back coefficients and must agree with the LP value.
 */
FitResult oracle_fit(const Dataset& data, const PenaltyWeights& w, double lambda, double support_eps = 1e-6);

}  // namespace ssvm
