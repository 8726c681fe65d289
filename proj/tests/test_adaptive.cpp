#include "support.hpp"
#include <ssvm/adaptive.hpp>
#include <ssvm/selection.hpp>
#include <ssvm/synthetic.hpp>
#include <gtest/gtest.h>

using namespace ssvm;

TEST(Scad, Examples)
{
    const double lambda = 0.3;
    EXPECT_DOUBLE_EQ(scad_derivative(0.5 * lambda, lambda, 3.7), lambda);
    EXPECT_NEAR(scad_derivative(2.0 * lambda, lambda, 3.7), 1.7 * lambda / 2.7, 1e-15);
    EXPECT_NEAR(scad_derivative(2.0 * lambda, lambda, 3.7) / lambda, 0.6296, 1e-4);
    EXPECT_EQ(scad_derivative(3.7 * lambda, lambda, 3.7), 0.0);
    EXPECT_EQ(scad_derivative(10.0, lambda, 3.7), 0.0);
}

TEST(Scad, WeightsBoundedAndNonIncreasing)
{
    const double lambda = 0.2;
    for (const double a : {2.1, 3.7, 10.0}) {
        double prev = 2.0;
        for (int k = 0; k <= 2000; ++k) {
            const double t = 0.001 * k;
            const double w = scad_derivative(t, lambda, a) / lambda;
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, 1.0);
            EXPECT_LE(w, prev);
            prev = w;
        }
    }
}

TEST(Scad, PlateauAndDeadZonePattern)
{
    const double lambda = 0.1, a = 3.7;
    Vector beta(5);
    beta << 0.0, 1.0, 0.0, -0.5, 0.0;  // |beta| >= a lambda on the support
    const Vector w = scad_weights(beta, lambda, a);
    const Vector expected = (Vector(5) << 1.0, 0.0, 1.0, 0.0, 1.0).finished();
    EXPECT_EQ(w, expected);
}

TEST(TwoStep, ConfigValidation)
{
    TwoStepConfig c;
    EXPECT_NO_THROW(c.validate());
    c.upsilon = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.scad_a = 2.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(TwoStep, FlatWeightsReproduceStageOne)
{
    const Dataset d = fixtures::random_dataset(40, 12, 1);
    const SignedDesign s(d, make_partition(12, 2));
    TwoStepConfig c;
    c.scad_a = 1e12;  // P' is lambda to within 1e-11 over the range of |beta|
    c.stage1.tol = c.stage2.tol = 1e-9;
    c.stage1.max_iter = c.stage2.max_iter = 200000;
    const double lambda = 0.3 * lambda_max(s);
    const TwoStepResult r = two_step_fit(s, lambda, c);
    EXPECT_LT((r.weights.array() - 1.0).abs().maxCoeff(), 1e-9);
    EXPECT_NEAR(r.fit.objective, r.stage1.objective, 1e-6 * r.stage1.objective);
    EXPECT_LT((r.fit.beta_plus - r.stage1.beta_plus).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(TwoStep, StageTwoImprovesOnStageOneUnderItsWeights)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset d = fixtures::random_dataset(50, 20, 10 + seed);
        const SignedDesign s(d, make_partition(20, 1));
        TwoStepConfig c;
        c.stage1.tol = c.stage2.tol = 1e-8;
        c.stage1.max_iter = c.stage2.max_iter = 100000;
        const double lambda = 0.2 * lambda_max(s);
        const TwoStepResult r = two_step_fit(s, lambda, c);
        const PenaltyWeights w(r.weights);
        const double stage1_under_w = objective(d, w, lambda, r.stage1.beta0, r.stage1.beta_plus);
        EXPECT_LE(r.fit.objective, stage1_under_w + 1e-7);
    }
}

TEST(TwoStep, UpsilonScalesStageOnePenalty)
{
    const Dataset d = fixtures::random_dataset(30, 8, 2);
    const SignedDesign s(d, make_partition(8, 1));
    TwoStepConfig c;
    c.upsilon = 2.0;
    const double lambda = 0.1 * lambda_max(s);
    const TwoStepResult r = two_step_fit(s, lambda, c);
    EXPECT_DOUBLE_EQ(r.stage1.lambda, 2.0 * lambda);
    EXPECT_DOUBLE_EQ(r.fit.lambda, lambda);
}

TEST(TwoStep, PerIterationReweightingRuns)
{
    const Dataset d = fixtures::random_dataset(30, 8, 3);
    const SignedDesign s(d, make_partition(8, 2));
    TwoStepConfig c;
    c.reweight_every_iteration = true;
    c.stage2.max_iter = 2000;
    const double lambda = 0.2 * lambda_max(s);
    const TwoStepResult r = two_step_fit(s, lambda, c);
    EXPECT_TRUE(std::isfinite(r.fit.objective));
    EXPECT_EQ(r.fit.beta_plus.size(), 8);
}

TEST(TwoStep, ImprovesDirectionRecoveryOnSimulatedData)
{
    // Paired comparison over 20 simulated data sets with n = 300, p = 500.
    SimSpec spec;
    spec.p = 500;
    spec.active = {50, 100, 250, 400};
    spec.seed = 1000;
    BenchConfig cfg;
    const auto results = run_benchmark(spec, 20, {BenchMethod::l1_cd, BenchMethod::two_step_cd}, cfg);
    int wins = 0;
    for (int r = 0; r < 20; ++r) {
        ASSERT_FALSE(results.at(r, 0).failed) << results.at(r, 0).error;
        ASSERT_FALSE(results.at(r, 1).failed) << results.at(r, 1).error;
        if (results.at(r, 1).metrics.aac >= results.at(r, 0).metrics.aac) ++wins;
    }
    EXPECT_GE(wins, 16);
}
