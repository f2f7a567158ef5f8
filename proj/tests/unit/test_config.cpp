#include "pcopt/config.hpp"
#include "pcopt/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace pcopt;

namespace {

bool rejects(const std::string& text) {
    try {
        static_cast<void>(parse_config(text));
    } catch (const Error& e) {
        return e.code() == Errc::config_error;
    }
    return false;
}

}  // namespace

TEST_CASE("empty object gives defaults") {
    const auto c = parse_config("{}");
    CHECK(c.objective == "rosenbrock");
    CHECK(c.samples_per_iteration == 10);
    CHECK(c.iterations == 50);
    CHECK(c.beta_policy == BetaPolicy::cross_validate);
    CHECK(c.model_policy == ModelPolicy::cv_model_select);
    CHECK(c.diagnostic_sample_count == 1000);
    CHECK_FALSE(c.search_box.has_value());
}

TEST_CASE("every section parses") {
    const auto c = parse_config(R"({
        "objective": {"name": "noisy-rosenbrock", "noise_stddev": 0.5},
        "search_box": {"lower": -2, "upper": [3, 4]},
        "initial_samples": 30, "samples_per_iteration": 20, "iterations": 7, "max_evaluations": 500,
        "initial_beta": 1e-4,
        "beta_policy": {"kind": "geometric", "k_beta": 1.5},
        "model_policy": {"kind": "fixed-M", "components": 3},
        "bagging": 10, "fold_count": 4,
        "em": {"max_iterations": 50, "nll_tolerance": 1e-8, "restarts": 2, "covariance_floor": 1e-9,
               "relative_covariance_floor": 0.0},
        "diagnostic_sample_count": 250, "fresh_samples_only": true, "threads": 2, "seed": 99
    })");
    CHECK(c.objective == "noisy-rosenbrock");
    CHECK(c.noise_stddev == 0.5);
    REQUIRE(c.search_box.has_value());
    CHECK(c.search_box->lower[1] == -2.0);
    CHECK(c.search_box->upper[1] == 4.0);
    CHECK(c.initial_samples == 30);
    CHECK(c.max_evaluations == 500);
    CHECK(c.initial_beta == 1e-4);
    CHECK(c.beta_policy == BetaPolicy::geometric);
    CHECK(c.k_beta == 1.5);
    CHECK(c.model_policy == ModelPolicy::fixed_m);
    CHECK(c.components == 3);
    CHECK(c.bagging == 10);
    CHECK(c.fold_count == 4);
    CHECK(c.em.restarts == 2);
    CHECK(c.em.relative_covariance_floor == 0.0);
    CHECK(c.fresh_samples_only);
    CHECK(c.threads == 2);
    CHECK(c.seed == 99);

    CHECK(parse_config(R"({"objective": "woods"})").objective_spec().dimension == 4);
    CHECK(parse_config(R"({"objective": {"name": "woods", "classical_woods": true}})").classical_woods);
}

TEST_CASE("malformed configs are rejected") {
    CHECK(rejects("{"));
    CHECK(rejects("[]"));
    CHECK(rejects(R"({"iteration": 5})"));
    CHECK(rejects(R"({"em": {"restart": 2}})"));
    CHECK(rejects(R"({"beta_policy": {"kind": "linear"}})"));
    CHECK(rejects(R"({"model_policy": {"kind": "single-gaussian", "extra": 1}})"));
    CHECK(rejects(R"({"objective": "sphere"})"));
    CHECK(rejects(R"({"iterations": -3})"));
    CHECK(rejects(R"({"iterations": 2.5})"));
    CHECK(rejects(R"({"initial_beta": "big"})"));
    CHECK(rejects(R"({"initial_beta": 0})"));
    CHECK(rejects(R"({"search_box": {"lower": [0, 0, 0], "upper": 1}})"));
    CHECK(rejects(R"({"search_box": {"lower": 1, "upper": 0}})"));
    CHECK(rejects(R"({"search_box": {"lower": 1}})"));
}

TEST_CASE("config_to_json round-trips") {
    const auto original = parse_config(R"({
        "objective": {"name": "noisy-rosenbrock", "noise_stddev": 0.25},
        "search_box": {"lower": [-1, -2], "upper": [1, 2]},
        "initial_beta": 0.001, "beta_policy": {"kind": "fixed"},
        "model_policy": {"kind": "stacking", "max_components": 3}, "seed": 7
    })");
    const auto text = config_to_json(original);
    const auto again = parse_config(text);
    CHECK(config_to_json(again) == text);
    CHECK(again.initial_beta == 0.001);
    CHECK(again.search_box->upper[1] == 2.0);
}

TEST_CASE("load_config reads files and reports missing ones") {
    const auto dir = std::filesystem::temp_directory_path() / "pcopt_test_config";
    std::filesystem::create_directories(dir);
    const auto path = dir / "c.json";
    std::ofstream(path) << R"({"iterations": 3})";
    CHECK(load_config(path).iterations == 3);
    try {
        static_cast<void>(load_config(dir / "absent.json"));
        FAIL("expected io error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io_error);
    }
    std::filesystem::remove_all(dir);
}
