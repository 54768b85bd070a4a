#include <gtest/gtest.h>

#include <filesystem>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "rusamp/serialize.hpp"

using namespace rusamp;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rusamp_test_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(slurp(p));
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

Json json_tail(const std::string& out) {
    const auto pos = out.find("\n{");
    EXPECT_NE(pos, std::string::npos);
    return Json::parse(out.substr(pos + 1));
}

fs::path write_spec(const fs::path& dir, double lambda0) {
    const fs::path p = dir / "spec.json";
    const RusSpec spec = make_rus_spec(1, {lambda0, 1 - lambda0}, gates::hadamard(), 4, {gates::pauli_z()});
    std::ofstream(p) << to_json(spec).dump();
    return p;
}

std::map<std::string, std::string> summary(const fs::path& dir) {
    const auto rows = read_csv(dir / "simulate_summary.csv");
    EXPECT_EQ(rows.size(), 2u);
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < rows[0].size(); ++i) out[rows[0][i]] = rows[1][i];
    return out;
}

}  // namespace

TEST(CliTcost, SpotValues) {
    const Result r = run({"tcost", "--lambda0", "0.5", "--delta", "1e-6", "--ct-a", "1", "--reflection-policy", "zero"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = json_tail(r.out);
    std::map<std::string, double> total;
    for (const Json& x : j["results"]) total[x["strategy"]] = x["total_t"];
    EXPECT_EQ(total.at("classical"), 19.0);
    EXPECT_EQ(total.at("pi3_oaa"), 27.0);
    EXPECT_EQ(total.size(), 5u);
}

TEST(CliTcost, LambdaOneCostsAFewApplications) {
    const Result r = run({"tcost", "--lambda0", "1", "--ct-a", "10", "--reflection-policy", "zero"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const Json& x : json_tail(r.out)["results"]) {
        EXPECT_GE(x["total_t"].get<double>(), 10.0);
        EXPECT_LE(x["total_t"].get<double>(), 30.0);
    }
}

TEST(CliTcost, InvalidInputs) {
    Result r = run({"tcost", "--lambda0", "1.5"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("lambda0"), std::string::npos);
    EXPECT_EQ(run({"tcost", "--lambda0", "0.5", "--delta", "2"}).code, 2);
    EXPECT_EQ(run({"tcost", "--lambda0", "0.5", "--reflection-policy", "cheap"}).code, 2);
    EXPECT_EQ(run({"tcost", "--lambda0", "abc"}).code, 2);
    EXPECT_EQ(run({"tcost"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliTcost, WritesCsvWithManifest) {
    const fs::path dir = scratch("tcost");
    ASSERT_EQ(run({"tcost", "--lambda0", "0.3", "--out", dir.string()}).code, 0);
    const auto rows = read_csv(dir / "tcost.csv");
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].size(), 8u);
    EXPECT_TRUE(fs::exists(dir / "tcost.manifest.json"));
}

TEST(CliSimulate, NoProtocolMeanAttempts) {
    const fs::path dir = scratch("sim_none");
    const fs::path spec = write_spec(dir, 0.5);
    const Result r = run({"simulate", "--spec", spec.string(), "--protocol", "none", "--trials", "8000", "--seed", "3",
                          "--psi", "+", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = summary(dir);
    EXPECT_NEAR(std::stod(s.at("mean_attempts")), 2.0, 5 * std::sqrt(2.0 / 8000));
    EXPECT_NEAR(std::stod(s.at("success_before")), 0.5, 1e-12);
    EXPECT_NEAR(std::stod(s.at("mean_fidelity")), 1.0, 1e-10);
    const auto trials = read_csv(dir / "simulate_trials.csv");
    EXPECT_EQ(trials.size(), 8001u);
    EXPECT_EQ(trials[0], (std::vector<std::string>{"trial", "attempts", "outcomes", "fidelity", "exhausted"}));
    const Json manifest = Json::parse(slurp(dir / "simulate_summary.manifest.json"));
    EXPECT_EQ(manifest["command"], "simulate");
    EXPECT_EQ(manifest["seed"], 3);
    EXPECT_EQ(manifest["config_hash"], config_hash(manifest["config"]));
}

TEST(CliSimulate, Pi3AtNinety) {
    const fs::path dir = scratch("sim_pi3");
    const Result r = run({"simulate", "--spec", write_spec(dir, 0.9).string(), "--protocol", "pi3:1", "--trials", "100",
                          "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(summary(dir).at("success_after")), 0.999, 1e-12);
    const Result neg = run({"simulate", "--spec", write_spec(dir, 0.9).string(), "--protocol", "pi3:1:neg", "--trials",
                            "10", "--out", dir.string()});
    EXPECT_EQ(neg.code, 0) << neg.err;
}

TEST(CliSimulate, DeterministicReachesOne) {
    const fs::path dir = scratch("sim_det");
    const Result r = run({"simulate", "--spec", write_spec(dir, 0.37).string(), "--protocol", "deterministic",
                          "--trials", "100", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = summary(dir);
    EXPECT_NEAR(std::stod(s.at("success_after")), 1.0, 1e-9);
    EXPECT_EQ(std::stod(s.at("mean_attempts")), 1.0);
}

TEST(CliSimulate, FixedPointAndStandard) {
    const fs::path dir = scratch("sim_fp");
    const std::string spec = write_spec(dir, 0.4).string();
    ASSERT_EQ(run({"simulate", "--spec", spec, "--protocol", "fp:1e-6", "--trials", "50", "--out", dir.string()}).code, 0);
    EXPECT_GE(std::stod(summary(dir).at("success_after")), 1 - 1e-6);
    ASSERT_EQ(run({"simulate", "--spec", spec, "--protocol", "fp:1e-3:0.2", "--trials", "50", "--out", dir.string()}).code,
              0);
    EXPECT_GE(std::stod(summary(dir).at("success_after")), 1 - 1e-3);
    ASSERT_EQ(run({"simulate", "--spec", spec, "--protocol", "standard:1", "--trials", "50", "--out", dir.string()}).code,
              0);
    EXPECT_NEAR(std::stod(summary(dir).at("success_after")), std::pow(std::sin(3 * std::asin(std::sqrt(0.4))), 2), 1e-12);
}

TEST(CliSimulate, ConfigErrors) {
    const fs::path dir = scratch("sim_err");
    const std::string spec = write_spec(dir, 0.5).string();
    EXPECT_EQ(run({"simulate", "--spec", (dir / "missing.json").string()}).code, 2);
    EXPECT_EQ(run({"simulate", "--spec", spec, "--protocol", "magic"}).code, 2);
    EXPECT_EQ(run({"simulate", "--spec", spec, "--protocol", "standard:x"}).code, 2);
    EXPECT_EQ(run({"simulate", "--spec", spec, "--protocol", "fp:2"}).code, 2);
    EXPECT_EQ(run({"simulate", "--spec", spec, "--psi", "0,0,0,0"}).code, 2);
    EXPECT_EQ(run({"simulate", "--spec", spec, "--trials", "0"}).code, 2);
    std::ofstream(dir / "bad.json") << "{not json";
    EXPECT_EQ(run({"simulate", "--spec", (dir / "bad.json").string()}).code, 2);
    std::ofstream(dir / "bad_lambdas.json") << R"({"m":1,"lambdas":[0.5,0.7],"target":[[1,0],[0,0],[0,0],[1,0]]})";
    EXPECT_EQ(run({"simulate", "--spec", (dir / "bad_lambdas.json").string()}).code, 2);
}

TEST(CliSimulate, ExhaustionRateFailure) {
    const fs::path dir = scratch("sim_exhaust");
    const Result r = run({"simulate", "--spec", write_spec(dir, 0.05).string(), "--trials", "200", "--max-attempts", "1",
                          "--out", dir.string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_GT(std::stoi(summary(dir).at("exhausted")), 100);
}

TEST(CliSimulate, ReproducibleBytes) {
    const fs::path a = scratch("sim_rep_a"), b = scratch("sim_rep_b");
    const std::string spec = write_spec(a, 0.3).string();
    ASSERT_EQ(run({"simulate", "--spec", spec, "--trials", "300", "--seed", "9", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"simulate", "--spec", spec, "--trials", "300", "--seed", "9", "--out", b.string()}).code, 0);
    EXPECT_EQ(slurp(a / "simulate_trials.csv"), slurp(b / "simulate_trials.csv"));
    EXPECT_EQ(slurp(a / "simulate_summary.csv"), slurp(b / "simulate_summary.csv"));
}

TEST(CliFigure, Fig1LeftIsByteStable) {
    const fs::path a = scratch("fig_a"), b = scratch("fig_b");
    ASSERT_EQ(run({"figure", "fig1-left", "--seed", "5", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"figure", "fig1-left", "--seed", "5", "--out", b.string()}).code, 0);
    EXPECT_EQ(slurp(a / "fig1-left.csv"), slurp(b / "fig1-left.csv"));
    EXPECT_TRUE(fs::exists(a / "fig1-left.manifest.json"));
}

TEST(CliFigure, Fig2HasFiveCurvesOnFiftyPoints) {
    const fs::path dir = scratch("fig2");
    ASSERT_EQ(run({"figure", "fig2", "--out", dir.string()}).code, 0);
    for (const char* panel : {"fig2-left.csv", "fig2-right.csv"}) {
        const auto rows = read_csv(dir / panel);
        ASSERT_EQ(rows.size(), 251u);
        std::map<std::string, int> per_curve;
        for (std::size_t i = 1; i < rows.size(); ++i) ++per_curve[rows[i][1]];
        EXPECT_EQ(per_curve.size(), 5u);
        for (const auto& [name, n] : per_curve) EXPECT_EQ(n, 50) << name;
    }
}

TEST(CliFigure, Fig3MeansInRange) {
    const fs::path dir = scratch("fig3");
    ASSERT_EQ(run({"figure", "fig3", "--out", dir.string()}).code, 0);
    const auto rows = read_csv(dir / "fig3.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double mean = std::stod(rows[i][2]);
        EXPECT_GE(mean, 0.5);
        EXPECT_LE(mean, 1.0);
    }
}

TEST(CliFigure, UnknownName) { EXPECT_EQ(run({"figure", "fig9"}).code, 2); }

TEST(CliFigure, GoldenFiles) {
    const fs::path dir = scratch("golden");
    for (const char* name : {"fig1-left", "fig1-right", "fig2", "fig3", "figd1"})
        ASSERT_EQ(run({"figure", name, "--seed", "20190601", "--out", dir.string()}).code, 0);
    const fs::path golden(RUSAMP_GOLDEN_DIR);
    for (const char* file : {"fig1-left.csv", "fig1-right.csv", "fig2-left.csv", "fig2-right.csv", "fig3.csv",
                             "figd1-left.csv", "figd1-right.csv"}) {
        ASSERT_TRUE(fs::exists(golden / file)) << file;
        EXPECT_EQ(slurp(dir / file), slurp(golden / file)) << file;
    }
}
