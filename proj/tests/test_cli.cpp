#include "support.hpp"
#include <ssvm/io.hpp>
#include <gtest/gtest.h>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ssvm;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " " + SSVM_CLI + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json model(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("ssvm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string at(const std::string& name) const { return (dir / name).string(); }

    /// Small simulated training file.
    std::string small_data(int n = 50, int p = 20)
    {
        const std::string sub = "sim" + std::to_string(n) + "_" + std::to_string(p);
        const auto r = run("simulate --n " + std::to_string(n) + " --p " + std::to_string(p) +
                           " --active 1,5,9 --seed 3 --out " + at(sub));
        EXPECT_EQ(r.code, 0);
        return at(sub + "/train.csv");
    }

    fs::path dir;
};

}  // namespace

TEST_F(Cli, SimulateWritesDeterministicFiles)
{
    const std::string args = "simulate --n 300 --p 3000 --active 50,1000,1500,2000 --signal 1.1 --seed 7 --out ";
    ASSERT_EQ(run(args + at("a")).code, 0);
    ASSERT_EQ(run(args + at("b")).code, 0);
    for (const char* f : {"train.csv", "test.csv", "truth.json"}) {
        ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    const auto truth = model(dir / "a" / "truth.json");
    ASSERT_EQ(truth["active"].size(), 4u);
    for (const auto& a : truth["active"]) EXPECT_EQ(a["value"].get<double>(), 1.1);
    const Dataset train = load_dataset(dir / "a" / "train.csv", DataFormat::csv);
    EXPECT_EQ(train.n(), 300);
    EXPECT_EQ(train.p(), 3000);
}

TEST_F(Cli, SimulateRejectsOutOfRangeActive)
{
    EXPECT_EQ(run("simulate --active 99999 --p 3000 --out " + at("x")).code, 1);
}

TEST_F(Cli, FitTinyDataset)
{
    const auto r = run("fit --data " + std::string(SSVM_DATA_DIR) + "/tiny.csv --lambda 0.5 --out " + at("m.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("objective"), std::string::npos);
    EXPECT_NE(r.out.find("support"), std::string::npos);
    EXPECT_NEAR(model(at("m.json"))["objective"].get<double>(), 0.5, 1e-5);
}

TEST_F(Cli, VariantsAgree)
{
    const std::string data = small_data();
    ASSERT_EQ(run("fit --data " + data + " --lambda 0.05 --variant cd --out " + at("cd.json")).code, 0);
    ASSERT_EQ(run("fit --data " + data + " --lambda 0.05 --variant prox --out " + at("prox.json")).code, 0);
    const double a = model(at("cd.json"))["objective"], b = model(at("prox.json"))["objective"];
    EXPECT_NEAR(a, b, 1e-5 * std::abs(a));
}

TEST_F(Cli, BlockCountDoesNotChangeCoefficients)
{
    const std::string data = small_data();
    const std::string common = "fit --data " + data + " --lambda 0.05 --tol 1e-9 --max-iter 200000 ";
    ASSERT_EQ(run(common + "--blocks 1 --out " + at("g1.json")).code, 0);
    ASSERT_EQ(run(common + "--blocks 4 --out " + at("g4.json")).code, 0);
    const FitResult a = fit_from_json(model(at("g1.json")), 20);
    const FitResult b = fit_from_json(model(at("g4.json")), 20);
    EXPECT_LT((a.beta_plus - b.beta_plus).cwiseAbs().maxCoeff(), 1e-4);
}

TEST_F(Cli, ScadPenalty)
{
    const std::string data = small_data();
    const auto r = run("fit --data " + data + " --lambda 0.05 --penalty scad --scad-a 3.7 --out " + at("s.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(model(at("s.json")).contains("objective"));
}

TEST_F(Cli, PathSingleLambdaIsSelected)
{
    const std::string data = small_data();
    ASSERT_EQ(run("path --data " + data + " --lambdas 0.07 --out " + at("p.jsonl")).code, 0);
    std::ifstream in(at("p.jsonl"));
    std::string line, last;
    int lines = 0;
    while (std::getline(in, line)) {
        last = line;
        ++lines;
    }
    EXPECT_EQ(lines, 2);
    const auto summary = nlohmann::json::parse(last);
    EXPECT_EQ(summary["selected_lambda"].get<double>(), 0.07);
    EXPECT_EQ(summary["selected_index"].get<int>(), 0);
}

TEST_F(Cli, PathSvmicSummaryPointsAtMinimum)
{
    const std::string data = small_data(80, 30);
    ASSERT_EQ(run("path --data " + data + " --n-lambda 15 --select svmic --out " + at("p.jsonl")).code, 0);
    std::ifstream in(at("p.jsonl"));
    std::vector<nlohmann::json> recs;
    std::string line;
    while (std::getline(in, line)) recs.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(recs.size(), 16u);
    const auto& summary = recs.back();
    double best = 1e300;
    for (std::size_t l = 0; l + 1 < recs.size(); ++l) best = std::min(best, recs[l]["score"].get<double>());
    EXPECT_EQ(summary["score"].get<double>(), best);
    EXPECT_EQ(summary["rule"], "svmic");
}

TEST_F(Cli, PathCrossValidationOnSeparableData)
{
    {
        std::ofstream out(at("sep.csv"));
        out << "y,f1,f2\n";
        for (int i = 0; i < 30; ++i) {
            const int y = i % 2 == 0 ? 1 : -1;
            out << y << ',' << y * (2.0 + 0.1 * (i % 7)) << ',' << 0.3 * ((i * 7) % 5 - 2) << '\n';
        }
    }
    ASSERT_EQ(run("path --data " + at("sep.csv") + " --select cv --folds 5 --n-lambda 5 --out " + at("p.jsonl")).code, 0);
    std::ifstream in(at("p.jsonl"));
    std::string line, last;
    while (std::getline(in, line)) last = line;
    const auto summary = nlohmann::json::parse(last);
    EXPECT_EQ(summary["rule"], "cv");
    EXPECT_EQ(summary["score"].get<double>(), 0.0);
}

TEST_F(Cli, ConvergenceCsv)
{
    const std::string data = small_data();
    const auto r = run("convergence --data " + data + " --lambda 0.05 --tol 1e-7 --out " + at("c.csv") + " --model " +
                       at("m.json"));
    ASSERT_EQ(r.code, 0);
    std::ifstream in(at("c.csv"));
    std::string header, line, last;
    std::getline(in, header);
    EXPECT_EQ(header, "iter,primal,dual,objective,dist");
    int rows = 0;
    while (std::getline(in, line)) {
        last = line;
        ++rows;
    }
    const auto m = model(at("m.json"));
    ASSERT_TRUE(m["converged"].get<bool>());
    EXPECT_EQ(rows, m["iterations"].get<int>());
    std::vector<std::string> cells;
    std::stringstream ss(last);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_LE(std::stod(cells[1]), 1e-7);
    EXPECT_NEAR(std::stod(cells[3]), m["objective"].get<double>(), 1e-12);
    EXPECT_LT(std::stod(cells[4]), 1e-10);  // the last snapshot is the reference
}

TEST_F(Cli, BenchmarkWithOracle)
{
    const std::string args = "benchmark --n 40 --p 10 --active 1,4 --reps 2 --n-lambda 5 --with-oracle --out ";
    const auto r = run(args + at("r.csv"));
    ASSERT_EQ(r.code, 0);
    const std::string csv = slurp(at("r.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,metric,mean,stderr");
    EXPECT_NE(csv.find("l1-lp,aac"), std::string::npos);
    EXPECT_NE(csv.find("l1-lp,failures,0"), std::string::npos);
    EXPECT_EQ(run("benchmark --p 3000 --reps 1 --with-oracle --out " + at("x.csv")).code, 1);
}

TEST_F(Cli, ExitCodes)
{
    EXPECT_EQ(run("fit --data /nonexistent.csv --lambda 0.1").code, 2);
    EXPECT_EQ(run("fit --lambda 0.1").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("fit --data " + std::string(SSVM_DATA_DIR) + "/tiny.csv --lambda 0.5 --theta 2 --out -").code, 1);
    EXPECT_EQ(run("fit --data " + std::string(SSVM_DATA_DIR) + "/tiny.csv --lambda 0.5 --blocks 3 --out -").code, 1);
    EXPECT_EQ(run("fit --data " + std::string(SSVM_DATA_DIR) + "/tiny.csv --lambda 0.5 --out -", "SSVM_THREADS=abc").code, 1);
    EXPECT_EQ(run("fit --data " + std::string(SSVM_DATA_DIR) + "/tiny.csv --lambda 0.5 --out -", "SSVM_THREADS=2").code, 0);
    {
        std::ofstream bad(at("bad.csv"));
        bad << "y,f1\n2,1.0\n";
    }
    EXPECT_EQ(run("fit --data " + at("bad.csv") + " --lambda 0.1").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}
