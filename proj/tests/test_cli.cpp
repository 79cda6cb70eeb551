#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cubeseek/bench.hpp"
#include "cubeseek/cli.hpp"
#include "cubeseek/random.hpp"
#include "cubeseek/stats.hpp"

using namespace cubeseek;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cubeseek");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cubeseek_test_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv("CUBESEEK_SEED");
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name) << text;
    }

    json read_json(const std::string& name) const {
        std::ifstream in(dir_ / name);
        return json::parse(in);
    }

    void write_model(const std::string& name, const json& model, const std::string& label) const {
        json j = model;
        j["label"] = label;
        write(name, j.dump());
    }

    // A dataset file of exponential times, written in the bench CSV format.
    void write_synthetic(const std::string& name, const std::vector<double>& times) const {
        bench::TimeDataset ds;
        for (std::size_t i = 0; i < times.size(); ++i) {
            TrialRecord r;
            r.seed = i;
            r.elapsed_seconds = times[i];
            r.iterations = 1;
            r.solution = Solution{2, 1, 1, 0};
            ds.records.push_back(r);
        }
        write(name, bench::to_csv(ds));
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveVerified) {
    const auto r = run_cli({"solve", "--k", "2", "--range", "R3", "--algo", "rsa", "--seed", "7"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("verified"), std::string::npos);
    EXPECT_NE(r.out.find("iterations"), std::string::npos);
    EXPECT_NE(r.out.find("elapsed"), std::string::npos);
}

TEST_F(CliTest, SolveJson) {
    const auto r = run_cli({"solve", "--algo", "pso", "--seed", "3", "--format", "json"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto j = json::parse(r.out);
    const auto x = j["solution"]["x"].get<std::int64_t>();
    const auto y = j["solution"]["y"].get<std::int64_t>();
    const auto z = j["solution"]["z"].get<std::int64_t>();
    EXPECT_TRUE(verify_solution(2, x, y, z));
    EXPECT_EQ(j["seed"], 3);
}

TEST_F(CliTest, SolveInsolubleK) {
    const auto r = run_cli({"solve", "--k", "13", "--algo", "sa"});
    EXPECT_EQ(r.code, cli::kExitError);
    EXPECT_NE(r.err.find("mod 9"), std::string::npos) << r.err;
}

TEST_F(CliTest, SolveTruncated) {
    const auto r = run_cli({"solve", "--k", "2", "--max-iterations", "0"});
    EXPECT_EQ(r.code, cli::kExitTruncated);
}

TEST_F(CliTest, SeedFromEnvironment) {
    const auto explicit_seed = run_cli({"solve", "--algo", "sa", "--seed", "11", "--format", "json"});
    setenv("CUBESEEK_SEED", "11", 1);
    const auto from_env = run_cli({"solve", "--algo", "sa", "--format", "json"});
    setenv("CUBESEEK_SEED", "eleven", 1);
    const auto bad = run_cli({"solve", "--algo", "sa"});
    unsetenv("CUBESEEK_SEED");
    ASSERT_EQ(explicit_seed.code, 0);
    ASSERT_EQ(from_env.code, 0);
    auto a = json::parse(explicit_seed.out);
    auto b = json::parse(from_env.out);
    a.erase("elapsed_seconds");
    b.erase("elapsed_seconds");
    EXPECT_EQ(a, b);
    EXPECT_EQ(bad.code, cli::kExitError);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"solve", "--algo", "ga"}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"solve", "--range", "R9"}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"solve", "--swarm-size", "2"}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"bench", "--n", "0", "--out", path("x.csv")}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"bench", "--n", "3"}).code, cli::kExitError);
    const auto help = run_cli({"--help"});
    EXPECT_EQ(help.code, cli::kExitOk);
    EXPECT_NE(help.out.find("solve"), std::string::npos);
}

TEST_F(CliTest, BenchWritesDatasetAndIsRepeatable) {
    const std::vector<std::string> args{"bench", "--algo", "pso", "--range", "R3", "--n", "100", "--seed", "1"};
    auto first = args;
    first.insert(first.end(), {"--out", path("a.csv")});
    auto second = args;
    second.insert(second.end(), {"--out", path("b.csv"), "--parallelism", "4"});
    const auto r1 = run_cli(first);
    const auto r2 = run_cli(second);
    ASSERT_EQ(r1.code, 0) << r1.err;
    ASSERT_EQ(r2.code, 0) << r2.err;
    EXPECT_NE(r1.out.find("histogram"), std::string::npos);

    const auto a = bench::load_dataset(path("a.csv"));
    const auto b = bench::load_dataset(path("b.csv"));
    ASSERT_EQ(a.size(), 100u);
    ASSERT_EQ(b.size(), 100u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.records[i].iterations, b.records[i].iterations);
        EXPECT_EQ(a.records[i].solution, b.records[i].solution);
    }
    const auto side = read_json("a.meta.json");
    EXPECT_EQ(side["n"], 100);
    EXPECT_EQ(side["range"], "R3");
}

TEST_F(CliTest, FitSyntheticExponential) {
    // The 95% interval covers the true rate for most seeds; this one is fixed.
    Rng rng(1);
    std::vector<double> t(4000);
    for (auto& v : t) v = -std::log(rng.uniform_open()) / 2.0;
    write_synthetic("syn.csv", t);
    const auto r = run_cli({"fit", path("syn.csv"), "--out", path("fit.json"), "--range-tag", "R3",
                            "--emit-plot-data", path("plot.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("exponential"), std::string::npos);
    const auto j = read_json("fit.json");
    const auto fitted = stats::fitted_models_from_json(j);
    const auto s = stats::exp_summary(fitted.exponential);
    EXPECT_TRUE(s.rate_ci->contains(2.0)) << fitted.exponential.rate;
    EXPECT_EQ(j["range"], "R3");

    std::ifstream plot(path("plot.csv"));
    std::string header;
    std::getline(plot, header);
    EXPECT_EQ(header, "bin_center,density,fitted_pdf_exponential,fitted_pdf_lognormal");
    int rows = 0;
    for (std::string line; std::getline(plot, line);) ++rows;
    EXPECT_EQ(rows, bench::kDefaultBins);

    const auto csv = run_cli({"fit", path("syn.csv"), "--out", path("fit.csv"), "--format", "csv"});
    EXPECT_EQ(csv.code, 0) << csv.err;
}

TEST_F(CliTest, FitErrors) {
    write_synthetic("bad.csv", {0.5, 0.0, 0.3});
    const auto r = run_cli({"fit", path("bad.csv")});
    EXPECT_EQ(r.code, cli::kExitError);
    EXPECT_FALSE(r.err.empty());
    write_synthetic("flat.csv", {0.5, 0.5, 0.5});
    EXPECT_EQ(run_cli({"fit", path("flat.csv")}).code, cli::kExitError);
    write("garbled.csv", "not,a,dataset\n");
    const auto g = run_cli({"fit", path("garbled.csv")});
    EXPECT_EQ(g.code, cli::kExitError);
    EXPECT_NE(g.err.find("line 1"), std::string::npos);
    EXPECT_EQ(run_cli({"fit", path("missing.csv")}).code, cli::kExitError);
}

TEST_F(CliTest, FitTwoRowsHasCoxInterval) {
    write_synthetic("two.csv", {0.2, 0.4});
    ASSERT_EQ(run_cli({"fit", path("two.csv"), "--out", path("two.json")}).code, 0);
    const auto j = read_json("two.json");
    const auto& ln = j["models"][1];
    EXPECT_EQ(ln["model"], "lognormal");
    EXPECT_TRUE(ln["summary"]["ci"].is_array());
}

TEST_F(CliTest, DistanceExponential) {
    write_model("pso.json", stats::to_json(stats::ExpModel{14.301, 10000}), "pso");
    write_model("sa.json", stats::to_json(stats::ExpModel{8.800, 10000}), "sa");
    write_model("rsa.json", stats::to_json(stats::ExpModel{10.014, 10000}), "rsa");
    const auto r = run_cli({"distance", path("pso.json"), path("sa.json"), path("rsa.json"), "--out", path("d.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json("d.json");
    EXPECT_NEAR(j["pairs"]["L12"].get<double>(), 0.49, 0.005);
    EXPECT_NEAR(j["pairs"]["L13"].get<double>(), 0.36, 0.005);
    EXPECT_NEAR(j["pairs"]["L23"].get<double>(), 0.13, 0.005);
    EXPECT_EQ(j["index"]["2"], "sa");
    EXPECT_EQ(j["family"], "exponential");
}

TEST_F(CliTest, DistanceLognormalFromFitReports) {
    const stats::FittedModels a{"pso", "R4", {0.305, 1000}, {0.62, 1.28, 1000}};
    const stats::FittedModels b{"sa", "R4", {0.162, 1000}, {1.08, 1.49, 1000}};
    const stats::FittedModels c{"rsa", "R4", {0.324, 1000}, {0.42, 1.41, 1000}};
    write("a.json", stats::to_json(a).dump());
    write("b.json", stats::to_json(b).dump());
    write("c.json", stats::to_json(c).dump());
    const auto r = run_cli({"distance", path("a.json"), path("b.json"), path("c.json"), "--family", "lognormal",
                            "--out", path("d.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json("d.json");
    EXPECT_NEAR(j["pairs"]["L12"].get<double>(), 0.40, 0.005);
    EXPECT_NEAR(j["pairs"]["L13"].get<double>(), 0.20, 0.005);
    EXPECT_NEAR(j["pairs"]["L23"].get<double>(), 0.46, 0.005);
    EXPECT_LE(j["bvp_vs_closed_form_max_abs"].get<double>(), 1e-8);
    EXPECT_LE(j["bvp_max_endpoint_residual"].get<double>(), 1e-8);

    // A fit report needs --family.
    EXPECT_EQ(run_cli({"distance", path("a.json"), path("b.json")}).code, cli::kExitError);
    const auto e = run_cli({"distance", path("a.json"), path("b.json"), "--family", "exponential", "--format", "csv",
                            "--out", path("d.csv")});
    EXPECT_EQ(e.code, 0) << e.err;
}

TEST_F(CliTest, DistanceEdgeCases) {
    write_model("one.json", stats::to_json(stats::ExpModel{2.0, 10}), "one");
    const auto single = run_cli({"distance", path("one.json"), "--out", path("d.json")});
    ASSERT_EQ(single.code, 0) << single.err;
    EXPECT_EQ(read_json("d.json")["matrix"], json::array({json::array({0.0})}));

    write_model("ln.json", stats::to_json(stats::LogNormalModel{0.0, 1.0, 10}), "ln");
    const auto mixed = run_cli({"distance", path("one.json"), path("ln.json")});
    EXPECT_EQ(mixed.code, cli::kExitError);
    EXPECT_EQ(run_cli({"distance", path("nope.json")}).code, cli::kExitError);
}

TEST_F(CliTest, Report) {
    const stats::FittedModels pso{"pso", "R3", {14.301, 10000}, {-3.229, 1.275, 10000}};
    const stats::FittedModels sa{"sa", "R3", {8.800, 10000}, {-2.791, 1.343, 10000}};
    write("pso.json", stats::to_json(pso).dump());
    write("sa.json", stats::to_json(sa).dump());
    const auto r = run_cli({"report", path("pso.json"), path("sa.json"), "--tau", "0.05", "--out", path("r.json"),
                            "--csv", path("r.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("1.6"), std::string::npos);
    const auto j = read_json("r.json");
    EXPECT_EQ(j["ratios"].size(), 2u);
    EXPECT_EQ(j["fast_runs"].size(), 4u);
    EXPECT_TRUE(fs::exists(path("r.csv")));
    EXPECT_EQ(run_cli({"report", path("pso.json")}).code, cli::kExitError);
}
