#pragma once
#include <ssvm/selection.hpp>
#include <ssvm/synthetic.hpp>
#include <filesystem>
#include <json.hpp>
#include <string>

namespace ssvm {

/// {"lambda", "intercept", "coef": [[j, value], ...], "iterations", "converged", "objective", "support_size"}
/// with 0-based feature indices and only nonzero coefficients listed.
nlohmann::json fit_to_json(const FitResult& fit);

/// Inverse of fit_to_json; `p` is the feature count. Throws data_error on malformed input.
FitResult fit_from_json(const nlohmann::json& j, Index p);

/// One fit record per line followed by {"selected_lambda", "selected_index", "rule", "score"}.
void write_path_jsonl(std::ostream& out, const PathResult& path);

/// Active indices and true coefficients of a simulated problem.
nlohmann::json truth_to_json(const SimSpec& spec, const Vector& beta_star);

/// Writes `text` to `path`, creating parent directories; throws data_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ssvm
