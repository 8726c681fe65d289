#pragma once
#include <ssvm/selection.hpp>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssvm {

/// Correlated Gaussian design with a probit label model.
struct SimSpec {
    Index n = 300;
    Index p = 3000;
    /// Feature correlation corr(x_j, x_k) = rho^|j-k|.
    double rho = 0.4;
    /// 0-based indices of the nonzero true coefficients.
    std::vector<Index> active{50, 1000, 1500, 2000};
    double signal = 1.1;
    std::uint64_t seed = 1;
    /// Test sample size; 0 means n.
    Index n_test = 0;

    void validate() const;
};

struct SimData {
    Dataset train;
    Dataset test;
    Vector beta_star;
};

/// Standard normal CDF.
double normal_cdf(double x);

/**
 * Rows follow x_1 ~ N(0,1), x_j = rho x_{j-1} + sqrt(1 - rho^2) e_j, and
 * P(y = +1 | x) = Phi(x^T beta_star). The test set is drawn after the
 * training set from the same generator.
 */
SimData generate(const SimSpec& spec);

struct Metrics {
    double test_error = 0.0;
    int signal = 0;
    int noise = 0;
    double aac = 0.0;
};

/// Absolute sample correlation of two vectors; 0 when either is constant.
double abs_correlation(const Vector& a, const Vector& b);

Metrics evaluate(const FitResult& fit, const Dataset& test, const Vector& beta_star,
                 const std::vector<Index>& active);

enum class BenchMethod { l1_cd, l1_prox, two_step_cd, two_step_prox, l1_lp };

std::string to_string(BenchMethod m);
BenchMethod parse_bench_method(const std::string& name);

/// Engine settings used by the benchmark unless overridden: phi = 0.05,
/// tol = 1e-5, max_iter = 5000.
SolverConfig bench_solver_defaults();

struct BenchConfig {
    /// Engine settings for the l1 paths; the variant is set per method.
    SolverConfig solver = bench_solver_defaults();
    /// Two-step settings; stage variants are set per method.
    TwoStepConfig two_step = {1.0, 3.7, bench_solver_defaults(), bench_solver_defaults(), false};
    int n_lambda = 100;
    double min_ratio = 0.01;
    Index blocks = 1;
    /// ADMM paths end early per svmic_stop_rule with this patience; 0 runs the full grid.
    int svmic_patience = 5;
};

struct RepRecord {
    int rep = 0;
    BenchMethod method = BenchMethod::l1_cd;
    Metrics metrics;
    bool failed = false;
    std::string error;
    double selected_lambda = 0.0;
    long total_iterations = 0;
};

struct BenchmarkResults {
    std::vector<BenchMethod> methods;
    int reps = 0;
    /// Replication-major: records[rep * methods.size() + m].
    std::vector<RepRecord> records;

    const RepRecord& at(int rep, std::size_t method) const { return records.at(rep * methods.size() + method); }
};

struct MetricSummary {
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct MethodSummary {
    BenchMethod method;
    MetricSummary test_error, signal, noise, aac;
    int failures = 0;
};

/**
 * For each replication r (seed = spec.seed + r): generate, fit every method
 * along a lambda grid, select by SVMIC_H, evaluate on the test set.
 * Replications run in parallel and are stored in replication order. A failed
 * fit is recorded with NaN metrics.
 */
BenchmarkResults run_benchmark(const SimSpec& spec, int reps, const std::vector<BenchMethod>& methods,
                               const BenchConfig& cfg);

/// Mean and standard error over the successful replications of each method.
std::vector<MethodSummary> summarize(const BenchmarkResults& results);

/// Columns: method,metric,mean,stderr.
void write_results_csv(std::ostream& out, const BenchmarkResults& results);
std::string format_results_table(const BenchmarkResults& results);

}  // namespace ssvm
