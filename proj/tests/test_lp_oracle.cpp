#include "support.hpp"
#include <ssvm/lp_oracle.hpp>
#include <gtest/gtest.h>
#include <limits>

using namespace ssvm;

namespace {

StandardLP generic(const Vector& c, const Matrix& M, const Vector& b)
{
    StandardLP lp;
    lp.c = c;
    lp.M = M;
    lp.b = b;
    return lp;
}

/// Minimum of c^T w over the vertices of {M w >= b, w >= 0}: every choice of
/// d linearly independent active constraints among the m + d available.
double vertex_enumeration(const StandardLP& lp)
{
    const Index d = lp.c.size(), m = lp.M.rows();
    Matrix all(m + d, d);
    all << lp.M, Matrix::Identity(d, d);
    Vector rhs(m + d);
    rhs << lp.b, Vector::Zero(d);
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> pick(m + d, false);
    std::fill(pick.begin(), pick.begin() + d, true);
    do {
        Matrix S(d, d);
        Vector r(d);
        Index k = 0;
        for (Index i = 0; i < m + d; ++i) {
            if (!pick[i]) continue;
            S.row(k) = all.row(i);
            r[k++] = rhs[i];
        }
        const Eigen::FullPivLU<Matrix> lu(S);
        if (lu.rank() < d) continue;
        const Vector w = lu.solve(r);
        if ((all * w - rhs).minCoeff() < -1e-9) continue;
        best = std::min(best, lp.c.dot(w));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

}  // namespace

TEST(Simplex, MatchesVertexEnumeration)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.1, 2.0);
    std::uniform_int_distribution<int> dims(1, 4);
    int solved = 0;
    for (int t = 0; t < 300; ++t) {
        const Index d = dims(rng), m = dims(rng);
        Vector c(d);
        for (Index j = 0; j < d; ++j) c[j] = pos(rng);  // bounded below by 0
        Matrix M(m, d);
        for (Index i = 0; i < m; ++i) {
            for (Index j = 0; j < d; ++j) M(i, j) = u(rng);
        }
        Vector b(m);
        for (Index i = 0; i < m; ++i) b[i] = u(rng);
        const StandardLP lp = generic(c, M, b);
        const double expected = vertex_enumeration(lp);
        if (!std::isfinite(expected)) {
            EXPECT_THROW(simplex_solve(lp), lp_error);
            continue;
        }
        const LpSolution sol = simplex_solve(lp);
        EXPECT_NEAR(sol.value, expected, 1e-9 * std::max(1.0, std::abs(expected))) << "trial " << t;
        EXPECT_GE((M * sol.w - b).minCoeff(), -1e-9);
        EXPECT_GE(sol.w.minCoeff(), 0.0);
        ++solved;
    }
    EXPECT_GT(solved, 150);
}

TEST(Simplex, TerminatesOnCyclingExample)
{
    // A degenerate program on which the largest-coefficient rule cycles.
    // max 3/4 x1 - 20 x2 + 1/2 x3 - 6 x4
    // s.t. 1/4 x1 - 8 x2 - x3 + 9 x4 <= 0, 1/2 x1 - 12 x2 - 1/2 x3 + 3 x4 <= 0, x3 <= 1
    Vector c(4);
    c << -0.75, 20.0, -0.5, 6.0;
    Matrix M(3, 4);
    M << -0.25, 8.0, 1.0, -9.0, -0.5, 12.0, 0.5, -3.0, 0.0, 0.0, -1.0, 0.0;
    Vector b(3);
    b << 0.0, 0.0, -1.0;
    const LpSolution sol = simplex_solve(generic(c, M, b), 1000);
    EXPECT_NEAR(sol.value, -1.25, 1e-12);
}

TEST(Simplex, InfeasibleAndUnbounded)
{
    Matrix M(1, 1);
    M << -1.0;
    EXPECT_THROW(simplex_solve(generic(Vector::Ones(1), M, Vector::Ones(1))), lp_error);
    M << 1.0;
    EXPECT_THROW(simplex_solve(generic(-Vector::Ones(1), M, Vector::Ones(1))), lp_error);
}

TEST(Simplex, PivotCap)
{
    std::mt19937_64 rng(2);
    const Dataset d = fixtures::random_dataset(20, 5, 2);
    const StandardLP lp = build_lp(d, PenaltyWeights::ones(5), 0.01);
    EXPECT_THROW(simplex_solve(lp, 1), lp_error);
}

TEST(BuildLp, LayoutAndGuard)
{
    const Dataset d = fixtures::symmetric_pair();
    const StandardLP lp = build_lp(d, PenaltyWeights::ones(1), 0.5);
    EXPECT_EQ(lp.variables(), 2 + 2 + 2);
    EXPECT_EQ(lp.constraints(), 2);
    EXPECT_EQ(lp.c[0], 0.5);
    EXPECT_EQ(lp.c[lp.u_offset()], 0.5);
    EXPECT_EQ(lp.M(1, lp.u_offset()), 1.0);  // y_2 x_2 = (-1)(-1)
    EXPECT_EQ(lp.M(1, lp.bplus_index()), -1.0);

    const Dataset wide = fixtures::random_dataset(10, 200, 1);
    EXPECT_THROW(build_lp(wide, PenaltyWeights::ones(200), 0.1), lp_error);
}

TEST(Oracle, AnalyticPair)
{
    const Dataset d = fixtures::symmetric_pair();
    const FitResult f = oracle_fit(d, PenaltyWeights::ones(1), 0.5);
    EXPECT_NEAR(f.objective, 0.5, 1e-12);
    // any beta in [0, 1] with beta0 = 0 is optimal at lambda = 0.5
    EXPECT_NEAR(objective(d, PenaltyWeights::ones(1), 0.5, f.beta0, f.beta_plus), 0.5, 1e-12);
    const FitResult g = oracle_fit(d, PenaltyWeights::ones(1), 0.1);
    EXPECT_NEAR(g.objective, 0.1, 1e-12);
    EXPECT_NEAR(g.beta_plus[0], 1.0, 1e-12);
    EXPECT_NEAR(g.beta0, 0.0, 1e-12);
}

TEST(Oracle, OptimalityAgainstPerturbations)
{
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset d = fixtures::random_dataset(15, 4, 50 + seed);
        const PenaltyWeights w = PenaltyWeights::ones(4);
        const FitResult f = oracle_fit(d, w, 0.05);
        for (int t = 0; t < 200; ++t) {
            const Vector db = fixtures::random_vector(4, rng, 0.05);
            const double d0 = fixtures::random_vector(1, rng, 0.05)[0];
            EXPECT_GE(objective(d, w, 0.05, f.beta0 + d0, f.beta_plus + db), f.objective - 1e-12);
        }
    }
}
