#include "pcopt/cli.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "pcopt");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int status = pcopt::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("pcopt_cli_" + std::to_string(std::rand()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

constexpr const char* kTinyConfig = R"({
    "samples_per_iteration": 5, "iterations": 3, "initial_beta": 0.001,
    "beta_policy": {"kind": "geometric", "k_beta": 1.5},
    "model_policy": {"kind": "single-gaussian"}, "diagnostic_sample_count": 50
})";

}  // namespace

TEST_CASE("bench lists the registry") {
    const auto r = invoke({"bench"});
    CHECK(r.status == 0);
    for (const char* name : {"rosenbrock", "woods", "noisy-rosenbrock"}) CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("error paths exit nonzero with a message") {
    auto r = invoke({"run", "--config", "/nonexistent/config.json"});
    CHECK(r.status != 0);
    CHECK_FALSE(r.err.empty());
    r = invoke({"frobnicate"});
    CHECK(r.status != 0);
    r = invoke({"run"});
    CHECK(r.status != 0);

    TempDir dir;
    std::ofstream(dir.path / "bad.json") << R"({"objective": "sphere"})";
    r = invoke({"run", "--config", (dir.path / "bad.json").string()});
    CHECK(r.status != 0);
    CHECK(r.err.find("sphere") != std::string::npos);
}

TEST_CASE("run writes the columnar trace") {
    TempDir dir;
    const auto cfg = dir.path / "c.json";
    std::ofstream(cfg) << kTinyConfig;
    auto r = invoke({"run", "--config", cfg.string()});
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("iter,beta,M,evals,expected_G,best_G\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);

    const auto out = dir.path / "run";
    r = invoke({"run", "--config", cfg.string(), "--seed", "5", "--out", out.string()});
    REQUIRE(r.status == 0);
    for (const char* f : {"trace.json", "trace.csv", "samples.csv", "timing.txt"}) CHECK(fs::exists(out / f));
    const auto first = slurp(out / "trace.json");
    REQUIRE(invoke({"run", "--config", cfg.string(), "--seed", "5", "--out", out.string()}).status == 0);
    CHECK(slurp(out / "trace.json") == first);
}

TEST_CASE("ensemble, compare and schedule") {
    TempDir dir;
    const auto cfg = dir.path / "c.json";
    std::ofstream(cfg) << kTinyConfig;

    auto r = invoke({"ensemble", "--config", cfg.string(), "--trials", "3", "--out", (dir.path / "e").string()});
    REQUIRE(r.status == 0);
    const auto agg = slurp(dir.path / "e" / "aggregate.csv");
    CHECK(agg.find("mean_expected_G") != std::string::npos);
    CHECK(agg.find("ci95_halfwidth") != std::string::npos);
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 4);

    r = invoke({"compare", "--config", cfg.string(), "--config", cfg.string(), "--trials", "3", "--out",
                (dir.path / "cmp").string()});
    REQUIRE(r.status == 0);
    std::istringstream rows(slurp(dir.path / "cmp" / "compare.csv"));
    std::string line;
    std::getline(rows, line);
    int n = 0;
    while (std::getline(rows, line)) {
        // iter,mean_a,mean_b,delta_mean,paired_delta_ci95,b_better,pairs
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
        REQUIRE(cols.size() == 7);
        CHECK(cols[3] == "0");
        CHECK(cols[5] == "0");
        ++n;
    }
    CHECK(n == 3);

    r = invoke({"compare", "--config", cfg.string(), "--trials", "3"});
    CHECK(r.status != 0);

    r = invoke({"schedule", "--config", cfg.string(), "--trials", "2", "--out", (dir.path / "s").string()});
    REQUIRE(r.status == 0);
    const auto sched = slurp(dir.path / "s" / "schedule.json");
    CHECK(sched.find("log_linear") != std::string::npos);
    CHECK(sched.find("nonlinear") != std::string::npos);
}
