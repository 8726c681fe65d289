// ssvm: sparse SVM fitting, regularization paths, simulation and benchmarks.

#include <ssvm/io.hpp>
#include <ssvm/lp_oracle.hpp>
#include <CLI11.hpp>
#include <omp.h>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ssvm;

namespace {

enum exit_code { ok = 0, usage = 1, bad_data = 2, solver_failure = 3 };

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Globals {
    int threads = 0;
    std::uint64_t seed = 1;
    Index blocks = 1;
    SolverConfig solver;
    std::string variant = "cd";
    std::string penalty = "l1";
    double upsilon = 1.0;
    double scad_a = 3.7;
    std::string out;
    // set when the engine flags were given explicitly
    bool phi_set = false, tol_set = false, max_iter_set = false;
};

struct SimFlags {
    Index n = 300, p = 3000, n_test = 0;
    double rho = 0.4, signal = 1.1;
    std::vector<Index> active{50, 1000, 1500, 2000};
};

struct DataFlags {
    std::string path;
    std::string format = "csv";
};

void add_sim_flags(CLI::App* cmd, SimFlags& s)
{
    cmd->add_option("--n", s.n, "training sample size");
    cmd->add_option("--p", s.p, "number of features");
    cmd->add_option("--n-test", s.n_test, "test sample size (0: same as --n)");
    cmd->add_option("--rho", s.rho, "AR(1) feature correlation");
    cmd->add_option("--active", s.active, "0-based active feature indices")->delimiter(',');
    cmd->add_option("--signal", s.signal, "value of every active coefficient");
}

void add_data_flags(CLI::App* cmd, DataFlags& d)
{
    cmd->add_option("--data", d.path, "dataset file")->required();
    cmd->add_option("--format", d.format, "csv or sparse")->check(CLI::IsMember({"csv", "sparse"}));
}

SimSpec make_spec(const SimFlags& f, const Globals& g)
{
    SimSpec s;
    s.n = f.n;
    s.p = f.p;
    s.n_test = f.n_test;
    s.rho = f.rho;
    s.signal = f.signal;
    s.active = f.active;
    s.seed = g.seed;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    return s;
}

SolverConfig solver_config(const Globals& g, const SolverConfig* base = nullptr)
{
    SolverConfig c = g.solver;
    if (base) {
        if (!g.phi_set) c.phi = base->phi;
        if (!g.tol_set) c.tol = base->tol;
        if (!g.max_iter_set) c.max_iter = base->max_iter;
    }
    c.variant = g.variant == "prox" ? BetaVariant::prox : BetaVariant::cd;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    return c;
}

TwoStepConfig two_step_config(const Globals& g, const SolverConfig* base = nullptr)
{
    TwoStepConfig t;
    t.upsilon = g.upsilon;
    t.scad_a = g.scad_a;
    t.stage1 = t.stage2 = solver_config(g, base);
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    return t;
}

Dataset read_data(const DataFlags& d)
{
    return load_dataset(d.path, d.format == "sparse" ? DataFormat::sparse : DataFormat::csv);
}

SignedDesign make_design(const Dataset& data, const Globals& g)
{
    if (g.blocks < 1 || g.blocks > data.p()) {
        throw usage_error("--blocks must lie in [1, " + std::to_string(data.p()) + "]");
    }
    return SignedDesign(data, make_partition(data.p(), g.blocks));
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::string csv_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const Globals& g, const SimFlags& f)
{
    const SimSpec spec = make_spec(f, g);
    const SimData sim = generate(spec);
    const std::filesystem::path dir = g.out.empty() ? "." : g.out;
    std::ostringstream train, test;
    write_csv(train, sim.train);
    write_csv(test, sim.test);
    write_text_file(dir / "train.csv", train.str());
    write_text_file(dir / "test.csv", test.str());
    write_text_file(dir / "truth.json", truth_to_json(spec, sim.beta_star).dump(2) + "\n");
    std::cout << "wrote " << (dir / "train.csv").string() << ", " << (dir / "test.csv").string() << ", "
              << (dir / "truth.json").string() << "\n";
}

FitResult run_fit(const SignedDesign& design, double lambda, const Globals& g, const FitOptions& options = {})
{
    if (g.penalty == "scad") {
        AdmmState state = AdmmState::zeros(design);
        return two_step_fit(design, lambda, two_step_config(g), state).fit;
    }
    AdmmState state = AdmmState::zeros(design);
    return fit_weighted_l1_svm(design, PenaltyWeights::ones(design.p()), lambda, solver_config(g), state, options);
}

void print_fit(const FitResult& fit)
{
    std::cout << "objective " << csv_number(fit.objective) << "\n"
              << "iterations " << fit.iterations << (fit.converged ? "" : " (not converged)") << "\n"
              << "support " << fit.support.size() << "\n";
}

void cmd_fit(const Globals& g, const DataFlags& d, double lambda)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw usage_error("--lambda must be a finite non-negative number");
    solver_config(g);
    if (g.penalty == "scad") two_step_config(g);
    const Dataset data = read_data(d);
    const SignedDesign design = make_design(data, g);
    const FitResult fit = run_fit(design, lambda, g);
    emit(g.out.empty() ? "model.json" : g.out, fit_to_json(fit).dump(2) + "\n");
    print_fit(fit);
}

struct PathFlags {
    std::string select = "svmic";
    int folds = 5;
    int n_lambda = 100;
    double min_ratio = 0.01;
    std::vector<double> lambdas;
};

void cmd_path(const Globals& g, const DataFlags& d, const PathFlags& f)
{
    PathConfig pc;
    pc.solver = solver_config(g);
    if (g.penalty == "scad") {
        pc.method = PathMethod::two_step;
        pc.two_step = two_step_config(g);
    }
    if (f.select == "cv" && f.folds < 2) throw usage_error("--folds must be at least 2");
    const Dataset data = read_data(d);
    const SignedDesign design = make_design(data, g);
    std::vector<double> grid = f.lambdas;
    if (grid.empty()) {
        try {
            grid = lambda_grid(design, f.n_lambda, f.min_ratio);
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
    }
    PathResult path = fit_path(design, grid, pc);
    if (f.select == "cv") {
        const CvResult cv = cross_validate(data, g.blocks, grid, f.folds, pc, g.seed);
        for (const auto& w : cv.warnings) std::cerr << "warning: " << w << "\n";
        select_cv(path, cv);
    } else {
        select_svmic(path, design);
    }
    std::ostringstream os;
    write_path_jsonl(os, path);
    emit(g.out.empty() ? "path.jsonl" : g.out, os.str());
    const FitResult& best = path.selected_fit();
    std::cout << "selected lambda " << csv_number(path.lambdas[path.selected]) << " (" << f.select
              << " score " << csv_number(path.scores[path.selected]) << ")\n";
    print_fit(best);
}

struct BenchFlags {
    int reps = 20;
    int n_lambda = 100;
    double min_ratio = 0.01;
    std::vector<std::string> methods{"l1-admm-cd", "two-step-admm-cd"};
    bool with_oracle = false;
    int patience = 5;
};

void cmd_benchmark(const Globals& g, const SimFlags& s, const BenchFlags& f)
{
    const SimSpec spec = make_spec(s, g);
    if (f.reps < 1) throw usage_error("--reps must be at least 1");
    std::vector<BenchMethod> methods;
    for (const auto& m : f.methods) {
        try {
            methods.push_back(parse_bench_method(m));
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
    }
    if (f.with_oracle && std::find(methods.begin(), methods.end(), BenchMethod::l1_lp) == methods.end()) {
        if (spec.n + 2 * spec.p + 2 > lp_size_guard) {
            throw usage_error("--with-oracle needs n + 2p + 2 <= " + std::to_string(lp_size_guard));
        }
        methods.push_back(BenchMethod::l1_lp);
    }
    BenchConfig cfg;
    const SolverConfig defaults = bench_solver_defaults();
    cfg.solver = solver_config(g, &defaults);
    cfg.two_step = two_step_config(g, &defaults);
    if (f.patience < 0) throw usage_error("--patience must be non-negative");
    cfg.svmic_patience = f.patience;
    cfg.n_lambda = f.n_lambda;
    cfg.min_ratio = f.min_ratio;
    cfg.blocks = g.blocks;
    if (g.blocks < 1 || g.blocks > spec.p) throw usage_error("--blocks must lie in [1, p]");

    const BenchmarkResults results = run_benchmark(spec, f.reps, methods, cfg);
    std::ostringstream os;
    write_results_csv(os, results);
    emit(g.out.empty() ? "results.csv" : g.out, os.str());
    std::cout << format_results_table(results);
    for (const auto& r : results.records) {
        if (r.failed) std::cerr << "rep " << r.rep << " " << to_string(r.method) << " failed: " << r.error << "\n";
    }
}

void cmd_convergence(const Globals& g, const DataFlags& d, double lambda, const std::string& model_path)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw usage_error("--lambda must be a finite non-negative number");
    if (g.penalty != "l1") throw usage_error("convergence diagnostics run the l1 engine; use --penalty l1");
    SolverConfig cfg = solver_config(g);
    const Dataset data = read_data(d);
    const SignedDesign design = make_design(data, g);

    Trajectory trajectory(static_cast<std::size_t>(cfg.max_snapshots));
    FitOptions options;
    options.trajectory = &trajectory;
    options.record_objective = true;
    AdmmState state = AdmmState::zeros(design);
    const FitResult fit = fit_weighted_l1_svm(design, PenaltyWeights::ones(design.p()), lambda, cfg, state, options);
    const std::vector<double> dist = dist_monitor(trajectory, state, design, cfg);

    std::vector<double> dist_at(fit.residual_history.size() + 1, std::numeric_limits<double>::quiet_NaN());
    std::size_t k = 0;
    for (const auto& snap : trajectory.snapshots()) {
        if (snap.iter >= 1 && static_cast<std::size_t>(snap.iter) < dist_at.size()) dist_at[snap.iter] = dist[k];
        ++k;
    }
    std::ostringstream os;
    os << "iter,primal,dual,objective,dist\n";
    for (std::size_t i = 0; i < fit.residual_history.size(); ++i) {
        const auto& r = fit.residual_history[i];
        os << i + 1 << ',' << csv_number(r.primal) << ',' << csv_number(r.dual) << ','
           << csv_number(fit.objective_history[i]) << ',';
        if (!std::isnan(dist_at[i + 1])) os << csv_number(dist_at[i + 1]);
        os << '\n';
    }
    emit(g.out.empty() ? "convergence.csv" : g.out, os.str());
    if (!model_path.empty()) write_text_file(model_path, fit_to_json(fit).dump(2) + "\n");
    print_fit(fit);
}

int resolve_threads(int flag)
{
    if (flag > 0) return flag;
    if (const char* env = std::getenv("SSVM_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t > 0) return t;
        } catch (const std::exception&) {
        }
        throw usage_error(std::string("SSVM_THREADS must be a positive integer, got '") + env + "'");
    }
    return omp_get_num_procs();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse support vector machines by parallel ADMM"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--threads", g.threads, "worker threads (default: SSVM_THREADS, else all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--blocks,-G", g.blocks, "number of feature blocks");
    app.add_option("--phi", g.solver.phi, "augmented Lagrangian parameter");
    app.add_option("--theta", g.solver.theta, "dual step length");
    app.add_option("--tol", g.solver.tol, "residual tolerance");
    app.add_option("--max-iter", g.solver.max_iter, "iteration limit");
    app.add_option("--variant", g.variant, "beta update: cd or prox")->check(CLI::IsMember({"cd", "prox"}));
    app.add_option("--penalty", g.penalty, "l1 or scad (two-step)")->check(CLI::IsMember({"l1", "scad"}));
    app.add_option("--upsilon", g.upsilon, "stage-one penalty scale for the two-step method");
    app.add_option("--scad-a", g.scad_a, "SCAD shape parameter");
    app.add_option("--out,-o", g.out, "output path ('-' for stdout)");

    SimFlags sim;
    auto* simulate = app.add_subcommand("simulate", "draw train/test data and write train.csv, test.csv, truth.json");
    add_sim_flags(simulate, sim);

    DataFlags fit_data;
    double fit_lambda = 0.0;
    auto* fit = app.add_subcommand("fit", "fit one penalty level and write a model JSON");
    add_data_flags(fit, fit_data);
    fit->add_option("--lambda", fit_lambda, "penalty level")->required();

    DataFlags path_data;
    PathFlags path_flags;
    auto* path = app.add_subcommand("path", "fit a lambda path and select a model");
    add_data_flags(path, path_data);
    path->add_option("--select", path_flags.select, "svmic or cv")->check(CLI::IsMember({"svmic", "cv"}));
    path->add_option("--folds", path_flags.folds, "cross-validation folds");
    path->add_option("--n-lambda", path_flags.n_lambda, "grid size");
    path->add_option("--min-ratio", path_flags.min_ratio, "smallest lambda as a fraction of lambda_max");
    path->add_option("--lambdas", path_flags.lambdas, "explicit decreasing grid")->delimiter(',');

    SimFlags bench_sim;
    BenchFlags bench_flags;
    auto* bench = app.add_subcommand("benchmark", "repeated simulation study; writes a results CSV");
    add_sim_flags(bench, bench_sim);
    bench->add_option("--reps", bench_flags.reps, "replications");
    bench->add_option("--n-lambda", bench_flags.n_lambda, "grid size");
    bench->add_option("--min-ratio", bench_flags.min_ratio, "smallest lambda as a fraction of lambda_max");
    bench->add_option("--methods", bench_flags.methods,
                      "l1-admm-cd, l1-admm-prox, two-step-admm-cd, two-step-admm-prox, l1-lp")
        ->delimiter(',');
    bench->add_option("--patience", bench_flags.patience,
                      "end a path after this many fits that SVMIC_H cannot select (0: full grid)");
    bench->add_flag("--with-oracle", bench_flags.with_oracle, "add the exact LP baseline (small instances only)");

    DataFlags conv_data;
    double conv_lambda = 0.0;
    std::string conv_model;
    auto* conv = app.add_subcommand("convergence", "per-iteration residuals, objective and Dist as CSV");
    add_data_flags(conv, conv_data);
    conv->add_option("--lambda", conv_lambda, "penalty level")->required();
    conv->add_option("--model", conv_model, "also write the model JSON here");
    conv->add_option("--snapshot-interval", g.solver.snapshot_interval, "iterations between Dist evaluations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        g.phi_set = app.count("--phi") > 0;
        g.tol_set = app.count("--tol") > 0;
        g.max_iter_set = app.count("--max-iter") > 0;
        omp_set_num_threads(resolve_threads(g.threads));
        if (*simulate) cmd_simulate(g, sim);
        if (*fit) cmd_fit(g, fit_data, fit_lambda);
        if (*path) cmd_path(g, path_data, path_flags);
        if (*bench) cmd_benchmark(g, bench_sim, bench_flags);
        if (*conv) cmd_convergence(g, conv_data, conv_lambda, conv_model);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return bad_data;
    } catch (const solver_error& e) {
        std::cerr << "solver failure at iteration " << e.iteration() << ": " << e.what() << "\n";
        return solver_failure;
    } catch (const lp_error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_failure;
    }
    return ok;
}
