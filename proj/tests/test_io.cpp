#include "support.hpp"
#include <ssvm/io.hpp>
#include <gtest/gtest.h>
#include <sstream>

using namespace ssvm;

TEST(ModelJson, RoundTrip)
{
    FitResult f;
    f.lambda = 0.25;
    f.beta0 = -0.125;
    f.beta_plus = Vector::Zero(5);
    f.beta_plus[1] = 0.1;
    f.beta_plus[4] = -3.0;
    f.iterations = 17;
    f.converged = true;
    f.objective = 0.4;
    f.support = {1, 4};
    const auto j = fit_to_json(f);
    EXPECT_EQ(j["coef"].size(), 2u);
    EXPECT_EQ(j["coef"][1][0].get<int>(), 4);
    const FitResult back = fit_from_json(nlohmann::json::parse(j.dump()), 5);
    EXPECT_EQ(back.beta_plus, f.beta_plus);
    EXPECT_EQ(back.beta0, f.beta0);
    EXPECT_EQ(back.lambda, f.lambda);
    EXPECT_EQ(back.iterations, 17);
    EXPECT_TRUE(back.converged);
    EXPECT_EQ(back.objective, 0.4);
    EXPECT_EQ(back.support, f.support);
}

TEST(ModelJson, Malformed)
{
    EXPECT_THROW(fit_from_json(nlohmann::json::parse(R"({"lambda": 1})"), 3), data_error);
    const auto bad = nlohmann::json::parse(
        R"({"lambda":1,"intercept":0,"coef":[[7,1.0]],"iterations":1,"converged":true,"objective":1})");
    EXPECT_THROW(fit_from_json(bad, 3), data_error);
}

TEST(PathJsonl, RecordsAndSummary)
{
    const Dataset d = fixtures::random_dataset(30, 6, 1);
    const SignedDesign s(d, make_partition(6, 2));
    PathResult path = fit_path(s, lambda_grid(s, 4, 0.1), PathConfig{});
    select_svmic(path, s);
    std::ostringstream os;
    write_path_jsonl(os, path);
    std::istringstream in(os.str());
    std::string line;
    std::vector<nlohmann::json> recs;
    while (std::getline(in, line)) recs.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(recs.size(), 5u);
    const auto& summary = recs.back();
    EXPECT_EQ(summary["rule"], "svmic");
    EXPECT_EQ(summary["selected_lambda"].get<double>(), path.lambdas[path.selected]);
    // the stored score is reproducible from the serialized fit
    const std::size_t k = summary["selected_index"].get<std::size_t>();
    FitResult f = fit_from_json(recs[k], 6);
    f.support = support_of(f.beta_plus, 1e-6);
    EXPECT_NEAR(svmic_h(f, d), summary["score"].get<double>(), 1e-10);
}

TEST(TruthJson, ListsActiveCoefficients)
{
    SimSpec s;
    s.p = 3000;
    Vector beta = Vector::Zero(3000);
    for (const Index j : s.active) beta[j] = 1.1;
    const auto j = truth_to_json(s, beta);
    ASSERT_EQ(j["active"].size(), 4u);
    EXPECT_EQ(j["active"][2]["index"].get<int>(), 1500);
    EXPECT_EQ(j["active"][2]["value"].get<double>(), 1.1);
}
