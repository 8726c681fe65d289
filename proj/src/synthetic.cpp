#include <ssvm/synthetic.hpp>
#include <ssvm/lp_oracle.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace ssvm {

void SimSpec::validate() const
{
    if (n < 1 || p < 1) throw std::invalid_argument("n and p must be positive");
    if (n_test < 0) throw std::invalid_argument("n_test must be non-negative");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
    if (!std::isfinite(signal)) throw std::invalid_argument("signal must be finite");
    for (const Index j : active) {
        if (j < 0 || j >= p) {
            throw std::invalid_argument("active index " + std::to_string(j) + " is outside [0, " + std::to_string(p) + ")");
        }
    }
}

SolverConfig bench_solver_defaults()
{
    SolverConfig c;
    c.phi = 0.05;
    c.tol = 1e-5;
    c.max_iter = 5000;
    return c;
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

Dataset draw(Index rows, const SimSpec& spec, const Vector& beta_star, boost::random::mt19937_64& rng)
{
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    boost::random::uniform_01<double> unif;
    const double innov = std::sqrt(1.0 - spec.rho * spec.rho);
    Matrix X(rows, spec.p);
    Vector y(rows);
    Vector x(spec.p);
    for (Index i = 0; i < rows; ++i) {
        x[0] = normal(rng);
        for (Index j = 1; j < spec.p; ++j) x[j] = spec.rho * x[j - 1] + innov * normal(rng);
        X.row(i) = x.transpose();
        double eta = 0.0;
        for (const Index j : spec.active) eta += x[j] * beta_star[j];
        y[i] = unif(rng) < normal_cdf(eta) ? 1.0 : -1.0;
    }
    return Dataset(std::move(X), std::move(y));
}

}  // namespace

SimData generate(const SimSpec& spec)
{
    spec.validate();
    Vector beta_star = Vector::Zero(spec.p);
    for (const Index j : spec.active) beta_star[j] = spec.signal;
    boost::random::mt19937_64 rng(spec.seed);
    Dataset train = draw(spec.n, spec, beta_star, rng);
    Dataset test = draw(spec.n_test > 0 ? spec.n_test : spec.n, spec, beta_star, rng);
    return SimData{std::move(train), std::move(test), std::move(beta_star)};
}

double abs_correlation(const Vector& a, const Vector& b)
{
    const Vector ca = a.array() - a.mean();
    const Vector cb = b.array() - b.mean();
    const double va = ca.squaredNorm();
    const double vb = cb.squaredNorm();
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return std::min(1.0, std::abs(ca.dot(cb)) / std::sqrt(va * vb));
}

Metrics evaluate(const FitResult& fit, const Dataset& test, const Vector& beta_star,
                 const std::vector<Index>& active)
{
    if (fit.beta_plus.size() != test.p() || beta_star.size() != test.p()) {
        throw std::invalid_argument("evaluate: dimension mismatch");
    }
    Metrics m;
    m.test_error = misclassification_rate(fit, test);
    for (const Index j : fit.support) {
        const bool relevant = std::find(active.begin(), active.end(), j) != active.end();
        (relevant ? m.signal : m.noise) += 1;
    }
    m.aac = abs_correlation(test.X() * beta_star, test.X() * fit.beta_plus);
    return m;
}

std::string to_string(BenchMethod m)
{
    switch (m) {
    case BenchMethod::l1_cd: return "l1-admm-cd";
    case BenchMethod::l1_prox: return "l1-admm-prox";
    case BenchMethod::two_step_cd: return "two-step-admm-cd";
    case BenchMethod::two_step_prox: return "two-step-admm-prox";
    case BenchMethod::l1_lp: return "l1-lp";
    }
    return "unknown";
}

BenchMethod parse_bench_method(const std::string& name)
{
    for (const auto m : {BenchMethod::l1_cd, BenchMethod::l1_prox, BenchMethod::two_step_cd, BenchMethod::two_step_prox,
                         BenchMethod::l1_lp}) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown benchmark method '" + name + "'");
}

namespace {

RepRecord failed_record(int rep, BenchMethod m, const std::string& why)
{
    RepRecord r;
    r.rep = rep;
    r.method = m;
    r.failed = true;
    r.error = why;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.metrics.test_error = nan;
    r.metrics.aac = nan;
    r.metrics.signal = -1;
    r.metrics.noise = -1;
    return r;
}

RepRecord selected_record(int rep, BenchMethod m, PathResult& path, const SignedDesign& design, const SimData& sim,
                          const SimSpec& spec)
{
    select_svmic(path, design);
    RepRecord r;
    r.rep = rep;
    r.method = m;
    r.metrics = evaluate(path.selected_fit(), sim.test, sim.beta_star, spec.active);
    r.selected_lambda = path.lambdas[path.selected];
    for (const auto& f : path.fits) r.total_iterations += f.iterations;
    for (const auto& f : path.stage1_fits) r.total_iterations += f.iterations;
    return r;
}

/// Runs one replication. Methods sharing a variant reuse the two-step path's
/// stage-one fits as the l1 path when the stage-one penalty is unscaled.
std::vector<RepRecord> run_replication(int rep, const SimSpec& base, const std::vector<BenchMethod>& methods,
                                       const BenchConfig& cfg)
{
    SimSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(rep);
    const SimData sim = generate(spec);
    const SignedDesign design(sim.train, make_partition(sim.train.p(), std::min(cfg.blocks, sim.train.p())));
    const auto grid = lambda_grid(design, cfg.n_lambda, cfg.min_ratio);

    std::vector<RepRecord> out(methods.size());
    std::vector<bool> done(methods.size(), false);
    auto index_of = [&](BenchMethod m) -> int {
        for (std::size_t k = 0; k < methods.size(); ++k) {
            if (methods[k] == m) return static_cast<int>(k);
        }
        return -1;
    };

    for (const auto variant : {BetaVariant::cd, BetaVariant::prox}) {
        const BenchMethod l1 = variant == BetaVariant::cd ? BenchMethod::l1_cd : BenchMethod::l1_prox;
        const BenchMethod two = variant == BetaVariant::cd ? BenchMethod::two_step_cd : BenchMethod::two_step_prox;
        const int i_l1 = index_of(l1);
        const int i_two = index_of(two);
        if (i_two >= 0) {
            PathConfig pc;
            pc.method = PathMethod::two_step;
            pc.two_step = cfg.two_step;
            pc.two_step.stage1.variant = variant;
            pc.two_step.stage2.variant = variant;
            if (cfg.svmic_patience > 0) pc.stop = svmic_stop_rule(design, cfg.svmic_patience);
            try {
                PathResult path = fit_path(design, grid, pc);
                out[i_two] = selected_record(rep, two, path, design, sim, spec);
                done[i_two] = true;
                if (i_l1 >= 0 && cfg.two_step.upsilon == 1.0) {
                    PathResult l1_path;
                    l1_path.lambdas = path.lambdas;
                    l1_path.fits = std::move(path.stage1_fits);
                    out[i_l1] = selected_record(rep, l1, l1_path, design, sim, spec);
                    done[i_l1] = true;
                }
            } catch (const std::exception& e) {
                out[i_two] = failed_record(rep, two, e.what());
                done[i_two] = true;
            }
        }
        if (i_l1 >= 0 && !done[i_l1]) {
            PathConfig pc;
            pc.solver = cfg.solver;
            pc.solver.variant = variant;
            if (cfg.svmic_patience > 0) pc.stop = svmic_stop_rule(design, cfg.svmic_patience);
            try {
                PathResult path = fit_path(design, grid, pc);
                out[i_l1] = selected_record(rep, l1, path, design, sim, spec);
            } catch (const std::exception& e) {
                out[i_l1] = failed_record(rep, l1, e.what());
            }
            done[i_l1] = true;
        }
    }

    if (const int i_lp = index_of(BenchMethod::l1_lp); i_lp >= 0) {
        try {
            PathResult path;
            path.lambdas = grid;
            const auto w = PenaltyWeights::ones(sim.train.p());
            for (const double lambda : grid) path.fits.push_back(oracle_fit(sim.train, w, lambda, cfg.solver.support_eps));
            out[i_lp] = selected_record(rep, BenchMethod::l1_lp, path, design, sim, spec);
        } catch (const std::exception& e) {
            out[i_lp] = failed_record(rep, BenchMethod::l1_lp, e.what());
        }
    }
    return out;
}

MetricSummary mean_stderr(const std::vector<double>& v)
{
    MetricSummary s;
    if (v.empty()) {
        s.mean = s.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (const double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (const double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return s;
}

}  // namespace

BenchmarkResults run_benchmark(const SimSpec& spec, int reps, const std::vector<BenchMethod>& methods,
                               const BenchConfig& cfg)
{
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    if (methods.empty()) throw std::invalid_argument("no benchmark methods selected");
    spec.validate();
    cfg.solver.validate();
    cfg.two_step.validate();
    if (cfg.svmic_patience < 0) throw std::invalid_argument("svmic_patience must be non-negative");

    BenchmarkResults results;
    results.methods = methods;
    results.reps = reps;
    results.records.resize(static_cast<std::size_t>(reps) * methods.size());

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        std::vector<RepRecord> recs;
        try {
            recs = run_replication(r, spec, methods, cfg);
        } catch (const std::exception& e) {
            for (const auto m : methods) recs.push_back(failed_record(r, m, e.what()));
        }
        for (std::size_t m = 0; m < methods.size(); ++m) results.records[r * methods.size() + m] = std::move(recs[m]);
    }
    return results;
}

std::vector<MethodSummary> summarize(const BenchmarkResults& results)
{
    std::vector<MethodSummary> out;
    for (std::size_t m = 0; m < results.methods.size(); ++m) {
        std::vector<double> err, sig, noi, aac;
        MethodSummary s;
        s.method = results.methods[m];
        for (int r = 0; r < results.reps; ++r) {
            const auto& rec = results.at(r, m);
            if (rec.failed) {
                ++s.failures;
                continue;
            }
            err.push_back(rec.metrics.test_error);
            sig.push_back(rec.metrics.signal);
            noi.push_back(rec.metrics.noise);
            aac.push_back(rec.metrics.aac);
        }
        s.test_error = mean_stderr(err);
        s.signal = mean_stderr(sig);
        s.noise = mean_stderr(noi);
        s.aac = mean_stderr(aac);
        out.push_back(s);
    }
    return out;
}

void write_results_csv(std::ostream& out, const BenchmarkResults& results)
{
    out << "method,metric,mean,stderr\n";
    char buf[128];
    for (const auto& s : summarize(results)) {
        const auto name = to_string(s.method);
        const std::pair<const char*, const MetricSummary*> rows[] = {
            {"test_error", &s.test_error}, {"signal", &s.signal}, {"noise", &s.noise}, {"aac", &s.aac}};
        for (const auto& [metric, v] : rows) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f\n", name.c_str(), metric, v->mean, v->stderr_);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%s,failures,%d,0.000000\n", name.c_str(), s.failures);
        out << buf;
    }
}

std::string format_results_table(const BenchmarkResults& results)
{
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-20s %-16s %-16s %-16s %-16s\n", "method", "test error", "signal", "noise", "AAC");
    os << buf;
    auto cell = [](const MetricSummary& m) {
        char c[64];
        std::snprintf(c, sizeof(c), "%.2f (%.2f)", m.mean, m.stderr_);
        return std::string(c);
    };
    for (const auto& s : summarize(results)) {
        std::snprintf(buf, sizeof(buf), "%-20s %-16s %-16s %-16s %-16s", to_string(s.method).c_str(),
                      cell(s.test_error).c_str(), cell(s.signal).c_str(), cell(s.noise).c_str(), cell(s.aac).c_str());
        os << buf;
        if (s.failures > 0) os << "  [" << s.failures << " failed]";
        os << '\n';
    }
    return os.str();
}

}  // namespace ssvm
