#include <ssvm/selection.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>

namespace ssvm {

double lambda_max(const SignedDesign& design)
{
    double best = 0.0;
    const double n = static_cast<double>(design.n());
    for (Index g = 0; g < design.blocks(); ++g) {
        // column sums of A_g are sum_i y_i x_ij
        const Vector sums = design.block(g).colwise().sum().transpose();
        best = std::max(best, sums.cwiseAbs().maxCoeff() / n);
    }
    return best;
}

std::vector<double> lambda_grid(const SignedDesign& design, int n_lambda, double min_ratio)
{
    if (n_lambda < 2) throw std::invalid_argument("n_lambda must be at least 2");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw std::invalid_argument("min_ratio must lie in (0, 1)");
    const double top = lambda_max(design);
    if (!(top > 0.0)) throw std::invalid_argument("lambda grid undefined: all-zero design");
    std::vector<double> grid(n_lambda);
    const double step = std::log(min_ratio) / static_cast<double>(n_lambda - 1);
    for (int l = 0; l < n_lambda; ++l) grid[l] = top * std::exp(step * l);
    grid.front() = top;
    grid.back() = top * min_ratio;
    return grid;
}

PathResult fit_path(const SignedDesign& design, const std::vector<double>& grid, const PathConfig& cfg)
{
    if (grid.empty()) throw std::invalid_argument("empty lambda grid");
    for (std::size_t l = 1; l < grid.size(); ++l) {
        if (!(grid[l] < grid[l - 1])) throw std::invalid_argument("lambda grid must be strictly decreasing");
    }
    PathResult path;
    path.lambdas = grid;
    path.fits.reserve(grid.size());

    AdmmState state = AdmmState::zeros(design);
    const auto weights = PenaltyWeights::ones(design.p());
    for (const double lambda : grid) {
        if (!cfg.warm_start) state = AdmmState::zeros(design);
        if (cfg.method == PathMethod::l1) {
            path.fits.push_back(fit_weighted_l1_svm(design, weights, lambda, cfg.solver, state));
        } else {
            auto res = two_step_fit(design, lambda, cfg.two_step, state);
            path.stage1_fits.push_back(std::move(res.stage1));
            path.fits.push_back(std::move(res.fit));
        }
        if (cfg.stop && cfg.stop(path)) break;
    }
    path.lambdas.resize(path.fits.size());
    path.scores.assign(path.fits.size(), 0.0);
    return path;
}

namespace {

double svmic_from_margins(const Vector& margins, std::size_t support_size)
{
    const double n = static_cast<double>(margins.size());
    if (margins.size() <= 2) throw std::invalid_argument("SVMIC_H needs n >= 3");
    const double log_n = std::log(n);
    return hinge_sum(margins) + std::log(log_n) * static_cast<double>(support_size) * log_n;
}

}  // namespace

double svmic_h(const FitResult& fit, const Dataset& data)
{
    if (fit.beta_plus.size() != data.p()) throw std::invalid_argument("svmic_h: dimension mismatch");
    Vector scores = data.X() * fit.beta_plus;
    scores.array() += fit.beta0;
    return svmic_from_margins(data.y().cwiseProduct(scores), fit.support.size());
}

double svmic_h(const FitResult& fit, const SignedDesign& design)
{
    return svmic_from_margins(design.margins(fit.beta0, fit.beta_plus), fit.support.size());
}

std::size_t select_min(const std::vector<double>& scores)
{
    if (scores.empty()) throw std::invalid_argument("select_min: no scores");
    std::size_t best = 0;
    for (std::size_t l = 1; l < scores.size(); ++l) {
        if (scores[l] < scores[best]) best = l;
    }
    return best;
}

void select_svmic(PathResult& path, const SignedDesign& design)
{
    path.scores.resize(path.fits.size());
    for (std::size_t l = 0; l < path.fits.size(); ++l) path.scores[l] = svmic_h(path.fits[l], design);
    path.rule = SelectionRule::svmic;
    path.selected = select_min(path.scores);
}

std::function<bool(const PathResult&)> svmic_stop_rule(const SignedDesign& design, int patience)
{
    if (patience < 1) throw std::invalid_argument("patience must be at least 1");
    const double log_n = std::log(static_cast<double>(design.n()));
    struct Tracker {
        double best = std::numeric_limits<double>::infinity();
        int streak = 0;
    };
    auto state = std::make_shared<Tracker>();
    return [&design, log_n, patience, state](const PathResult& path) {
        const FitResult& fit = path.fits.back();
        const double bound = std::log(log_n) * static_cast<double>(fit.support.size()) * log_n;
        state->best = std::min(state->best, svmic_h(fit, design));
        state->streak = bound > state->best ? state->streak + 1 : 0;
        return state->streak >= patience;
    };
}

std::vector<int> stratified_folds(const Vector& y, int k, std::uint64_t seed)
{
    if (k < 2) throw std::invalid_argument("need at least 2 folds");
    if (y.size() < k) throw std::invalid_argument("fewer samples than folds");
    boost::random::mt19937_64 rng(seed);
    std::vector<Index> pos, neg;
    for (Index i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg).push_back(i);
    auto shuffle = [&rng](std::vector<Index>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(v[i - 1], v[pick(rng)]);
        }
    };
    shuffle(pos);
    shuffle(neg);
    std::vector<int> fold(y.size());
    int next = 0;
    for (const auto* cls : {&pos, &neg}) {
        for (const Index i : *cls) {
            fold[i] = next;
            next = (next + 1) % k;
        }
    }
    return fold;
}

double misclassification_rate(const FitResult& fit, const Dataset& data)
{
    Vector scores = data.X() * fit.beta_plus;
    scores.array() += fit.beta0;
    Index wrong = 0;
    for (Index i = 0; i < data.n(); ++i) {
        const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
        if (predicted != data.y()[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.n());
}

namespace {

Dataset subset_rows(const Dataset& data, const std::vector<Index>& rows)
{
    Matrix X(static_cast<Index>(rows.size()), data.p());
    Vector y(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        X.row(static_cast<Index>(r)) = data.X().row(rows[r]);
        y[static_cast<Index>(r)] = data.y()[rows[r]];
    }
    return Dataset(std::move(X), std::move(y));
}

bool single_class(const Vector& y)
{
    return (y.array() > 0).all() || (y.array() < 0).all();
}

}  // namespace

CvResult cross_validate(const Dataset& data, Index blocks, const std::vector<double>& grid, int k,
                        const PathConfig& cfg, std::uint64_t seed)
{
    CvResult out;
    out.fold_of = stratified_folds(data.y(), k, seed);
    out.fold_errors.assign(k, std::vector<double>(grid.size(), 0.0));
    std::vector<std::string> fold_warning(k);
    std::vector<std::exception_ptr> failure(k);

#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < k; ++f) {
        try {
            std::vector<Index> train_rows, test_rows;
            for (Index i = 0; i < data.n(); ++i) (out.fold_of[i] == f ? test_rows : train_rows).push_back(i);
            const Dataset train = subset_rows(data, train_rows);
            const Dataset test = subset_rows(data, test_rows);
            if (single_class(train.y()) || single_class(test.y())) {
                fold_warning[f] = "fold " + std::to_string(f) + " contains a single class";
            }
            const SignedDesign design(train, make_partition(train.p(), std::min(blocks, train.p())));
            const PathResult path = fit_path(design, grid, cfg);
            for (std::size_t l = 0; l < grid.size(); ++l) {
                out.fold_errors[f][l] = misclassification_rate(path.fits[l], test);
            }
        } catch (...) {
            failure[f] = std::current_exception();
        }
    }
    for (int f = 0; f < k; ++f) {
        if (failure[f]) std::rethrow_exception(failure[f]);
        if (!fold_warning[f].empty()) out.warnings.push_back(fold_warning[f]);
    }
    out.errors.assign(grid.size(), 0.0);
    for (int f = 0; f < k; ++f) {
        for (std::size_t l = 0; l < grid.size(); ++l) out.errors[l] += out.fold_errors[f][l];
    }
    for (auto& e : out.errors) e /= static_cast<double>(k);
    return out;
}

void select_cv(PathResult& path, const CvResult& cv)
{
    if (cv.errors.size() != path.fits.size()) throw std::invalid_argument("CV errors do not match the path");
    path.scores = cv.errors;
    path.rule = SelectionRule::cv;
    path.selected = select_min(path.scores);
}

}  // namespace ssvm
