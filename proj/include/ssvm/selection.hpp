#pragma once
#include <ssvm/adaptive.hpp>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ssvm {

/// max_j |(1/n) sum_i y_i x_ij|, the l1 penalty level where beta_plus = 0 becomes optimal.
double lambda_max(const SignedDesign& design);

/// n_lambda log-spaced values from lambda_max down to min_ratio * lambda_max.
std::vector<double> lambda_grid(const SignedDesign& design, int n_lambda, double min_ratio);

enum class PathMethod { l1, two_step };
enum class SelectionRule { svmic, cv };

struct PathResult {
    std::vector<double> lambdas;
    std::vector<FitResult> fits;
    /// Stage-one fits for the two-step method; empty otherwise.
    std::vector<FitResult> stage1_fits;
    std::vector<double> scores;
    std::size_t selected = 0;
    SelectionRule rule = SelectionRule::svmic;

    const FitResult& selected_fit() const { return fits.at(selected); }
};

struct PathConfig {
    PathMethod method = PathMethod::l1;
    SolverConfig solver;
    /// Used when method is two_step; its stage configs override `solver`.
    TwoStepConfig two_step;
    bool warm_start = true;
    /// Checked after every fit; returning true ends the path there.
    std::function<bool(const PathResult&)> stop;
};

/**
 * Fits every lambda of a descending grid. With warm starts each fit begins at
 * the previous lambda's final state; for the two-step method the chain runs
 * through the stage-one states.
 */
PathResult fit_path(const SignedDesign& design, const std::vector<double>& grid, const PathConfig& cfg);

/**
 * sum_i (1 - y_i beta0 - y_i x_i^T beta)_+ + log(log n) |support| log n.
 * @throws std::invalid_argument when n <= 2.
 */
double svmic_h(const FitResult& fit, const Dataset& data);
double svmic_h(const FitResult& fit, const SignedDesign& design);

/// First index attaining the minimum, i.e. the largest lambda on ties.
std::size_t select_min(const std::vector<double>& scores);

/// Fills scores with SVMIC_H values and picks the minimizer.
void select_svmic(PathResult& path, const SignedDesign& design);

/**
 * Stop rule for paths that will be scored by SVMIC_H. The score of a fit is
 * at least its support term log(log n) |support| log n, so once that term
 * alone exceeds the best score seen for `patience` consecutive fits the rest
 * of the path is unlikely to be selected.
 */
std::function<bool(const PathResult&)> svmic_stop_rule(const SignedDesign& design, int patience);

struct CvResult {
    std::vector<double> errors;
    /// fold_errors[f][l]: misclassification rate of fold f at lambda l.
    std::vector<std::vector<double>> fold_errors;
    std::vector<int> fold_of;
    std::vector<std::string> warnings;
};

/// Label-stratified fold assignment, deterministic in `seed`.
std::vector<int> stratified_folds(const Vector& y, int k, std::uint64_t seed);

/// Classification by sign(beta0 + x^T beta), exact zero predicted as +1.
double misclassification_rate(const FitResult& fit, const Dataset& data);

/**
 * k-fold cross-validation of the path on `data` split into `blocks` column
 * blocks. Folds run in parallel; errors are averaged in fold order.
 */
CvResult cross_validate(const Dataset& data, Index blocks, const std::vector<double>& grid, int k,
                        const PathConfig& cfg, std::uint64_t seed);

/// Copies CV errors into the path's scores and picks the minimizer.
void select_cv(PathResult& path, const CvResult& cv);

}  // namespace ssvm
