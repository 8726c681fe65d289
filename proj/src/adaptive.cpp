#include <ssvm/adaptive.hpp>
#include <algorithm>
#include <cmath>

namespace ssvm {

void TwoStepConfig::validate() const
{
    if (!(upsilon > 0.0)) throw std::invalid_argument("upsilon must be positive");
    if (!(scad_a > 2.0)) throw std::invalid_argument("scad_a must exceed 2");
    stage1.validate();
    stage2.validate();
}

double scad_derivative(double t, double lambda, double a)
{
    if (t <= lambda) return lambda;
    return std::max(a * lambda - t, 0.0) / (a - 1.0);
}

Vector scad_weights(const Vector& beta_plus, double lambda, double a)
{
    Vector w(beta_plus.size());
    for (Index j = 0; j < w.size(); ++j) w[j] = scad_derivative(std::abs(beta_plus[j]), lambda, a) / lambda;
    return w;
}

TwoStepResult two_step_fit(const SignedDesign& design, double lambda, const TwoStepConfig& cfg,
                           AdmmState& stage1_state)
{
    cfg.validate();
    TwoStepResult out;
    out.stage1 = fit_weighted_l1_svm(design, PenaltyWeights::ones(design.p()), cfg.upsilon * lambda, cfg.stage1,
                                     stage1_state);
    out.weights = scad_weights(out.stage1.beta_plus, lambda, cfg.scad_a);

    AdmmState stage2_state = stage1_state;
    FitOptions options;
    if (cfg.reweight_every_iteration) {
        const double a = cfg.scad_a;
        options.reweight = [lambda, a](const AdmmState& s) { return scad_weights(s.beta_plus(), lambda, a); };
    }
    out.fit = fit_weighted_l1_svm(design, PenaltyWeights(out.weights), lambda, cfg.stage2, stage2_state, options);
    return out;
}

TwoStepResult two_step_fit(const SignedDesign& design, double lambda, const TwoStepConfig& cfg)
{
    AdmmState state = AdmmState::zeros(design);
    return two_step_fit(design, lambda, cfg, state);
}

}  // namespace ssvm
