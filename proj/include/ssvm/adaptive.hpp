#pragma once
#include <ssvm/admm.hpp>

namespace ssvm {

enum class PenaltyKind { l1, scad };

struct TwoStepConfig {
    /// Stage one penalizes at upsilon * lambda.
    double upsilon = 1.0;
    double scad_a = 3.7;
    SolverConfig stage1;
    SolverConfig stage2;
    /// Recompute the weights from the current iterate at every stage-two
    /// iteration instead of once from the stage-one solution.
    bool reweight_every_iteration = false;

    void validate() const;
};

/**
 * SCAD derivative P'_lambda(t) for t >= 0:
 *      lambda                      t <= lambda
 *      (a lambda - t)_+ / (a - 1)  t >  lambda
 */
double scad_derivative(double t, double lambda, double a);

/// alpha_j = P'_lambda(|beta_j|) / lambda, each in [0, 1].
Vector scad_weights(const Vector& beta_plus, double lambda, double a);

struct TwoStepResult {
    FitResult fit;
    FitResult stage1;
    Vector weights;
};

/**
 * Stage one: l1 fit with unit weights at upsilon * lambda, starting from
 * `stage1_state` (updated in place so a path can chain through it).
 * Stage two: weighted fit at lambda with SCAD-derived weights, warm-started
 * from a copy of the stage-one state.
 */
TwoStepResult two_step_fit(const SignedDesign& design, double lambda, const TwoStepConfig& cfg,
                           AdmmState& stage1_state);

TwoStepResult two_step_fit(const SignedDesign& design, double lambda, const TwoStepConfig& cfg);

}  // namespace ssvm
