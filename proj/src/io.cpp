#include <ssvm/io.hpp>
#include <fstream>
#include <ostream>

namespace ssvm {

using nlohmann::json;

json fit_to_json(const FitResult& fit)
{
    json coef = json::array();
    for (Index j = 0; j < fit.beta_plus.size(); ++j) {
        if (fit.beta_plus[j] != 0.0) coef.push_back({j, fit.beta_plus[j]});
    }
    return {{"lambda", fit.lambda},
            {"intercept", fit.beta0},
            {"coef", std::move(coef)},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"objective", fit.objective},
            {"support_size", fit.support.size()}};
}

FitResult fit_from_json(const json& j, Index p)
{
    FitResult fit;
    try {
        fit.lambda = j.at("lambda").get<double>();
        fit.beta0 = j.at("intercept").get<double>();
        fit.iterations = j.at("iterations").get<int>();
        fit.converged = j.at("converged").get<bool>();
        fit.objective = j.at("objective").get<double>();
        fit.beta_plus = Vector::Zero(p);
        for (const auto& entry : j.at("coef")) {
            const auto idx = entry.at(0).get<Index>();
            if (idx < 0 || idx >= p) throw data_error("coefficient index " + std::to_string(idx) + " out of range");
            fit.beta_plus[idx] = entry.at(1).get<double>();
        }
    } catch (const json::exception& e) {
        throw data_error(std::string("malformed model JSON: ") + e.what());
    }
    for (Index k = 0; k < p; ++k) {
        if (fit.beta_plus[k] != 0.0) fit.support.push_back(k);
    }
    return fit;
}

void write_path_jsonl(std::ostream& out, const PathResult& path)
{
    for (std::size_t l = 0; l < path.fits.size(); ++l) {
        json rec = fit_to_json(path.fits[l]);
        rec["index"] = l;
        if (l < path.scores.size()) rec["score"] = path.scores[l];
        out << rec.dump() << '\n';
    }
    if (path.fits.empty()) return;
    json summary = {{"selected_lambda", path.lambdas.at(path.selected)},
                    {"selected_index", path.selected},
                    {"rule", path.rule == SelectionRule::svmic ? "svmic" : "cv"},
                    {"score", path.selected < path.scores.size() ? path.scores[path.selected] : 0.0}};
    out << summary.dump() << '\n';
}

json truth_to_json(const SimSpec& spec, const Vector& beta_star)
{
    json active = json::array();
    for (const Index j : spec.active) active.push_back({{"index", j}, {"value", beta_star[j]}});
    return {{"n", spec.n}, {"p", spec.p}, {"rho", spec.rho}, {"seed", spec.seed}, {"active", std::move(active)}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << text;
    if (!out) throw data_error("failed writing " + path.string());
}

}  // namespace ssvm
