#pragma once

#include "pcopt/fitting.hpp"
#include "pcopt/meta.hpp"
#include "pcopt/models.hpp"
#include "pcopt/objectives.hpp"
#include "pcopt/sample_set.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcopt {

enum class BetaPolicy { cross_validate, geometric, fixed };
enum class ModelPolicy { single_gaussian, fixed_m, cv_model_select, stacking };

struct RunConfig {
    std::string objective = "rosenbrock";
    std::optional<double> noise_stddev;  // registry default when absent
    bool classical_woods = false;
    /// Defaults to [-5, 5]^n when absent.
    std::optional<Box> search_box;
    std::size_t initial_samples = 0;  // 0 means samples_per_iteration
    std::size_t samples_per_iteration = 10;
    std::size_t iterations = 50;
    std::size_t max_evaluations = 0;  // 0 means no budget beyond iterations
    double initial_beta = 0.1;
    BetaPolicy beta_policy = BetaPolicy::cross_validate;
    double k_beta = 2.0;
    BetaGrid beta_grid;
    ModelPolicy model_policy = ModelPolicy::cv_model_select;
    std::size_t components = 1;      // fixed-m
    std::size_t max_components = 4;  // cv-model-select and stacking try 1..max_components
    std::size_t bagging = 0;
    std::size_t fold_count = 5;
    EmConfig em;
    std::size_t diagnostic_sample_count = 1000;
    bool fresh_samples_only = false;
    std::size_t threads = 1;
    std::uint64_t seed = 1;

    /// Throws config_error on any violated constraint.
    void validate() const;
    [[nodiscard]] ObjectiveSpec objective_spec() const;
    [[nodiscard]] Box box() const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double beta_center = 0.0;  // beta entering the iteration
    double beta = 0.0;         // beta used for the final fit
    std::size_t model_components = 1;  // chosen M (model class)
    std::size_t mixture_components = 1;  // components of the sampling mixture
    std::uint64_t evaluations = 0;  // cumulative optimization-budget evaluations
    double expected_G = 0.0;        // diagnostic estimate of E_q[G]
    double best_G = 0.0;            // best sampled G so far
    std::optional<CvScores> beta_cv;
    std::optional<CvScores> model_cv;
    std::vector<double> stacking_weights;
    double fit_nll = 0.0;
    std::string model;  // serialized sampling mixture
};

struct RunTrace {
    RunConfig config;
    std::vector<IterationRecord> records;
    std::optional<MixtureModel> final_model;
    SampleSet samples;
    std::vector<std::size_t> sample_origin;  // 0 = initial uniform, t + 1 = drawn in iteration t
    std::vector<std::uint64_t> evaluations_per_iteration;
    std::uint64_t diagnostic_evaluations = 0;
    bool failed = false;
    std::string failure;
    double wall_time_seconds = 0.0;
};

double update_beta_geometric(double beta, double k_beta);

/// The outer loop: uniform start, then fit / sample / evaluate / update beta
/// until the iteration or evaluation budget runs out. Library errors inside
/// the loop end the run with `failed` set and a partial trace.
RunTrace pc_optimize(const RunConfig& cfg);

struct AggregateRow {
    std::size_t iteration = 0;
    double mean_beta = 0.0;
    double mean_evaluations = 0.0;
    double mean_expected_G = 0.0;
    double ci95_halfwidth = 0.0;
    double median_expected_G = 0.0;
    double median_best_G = 0.0;
    std::size_t trials_ok = 0;
};

struct EnsembleReport {
    std::vector<RunTrace> traces;
    std::vector<std::uint64_t> seeds;
    std::vector<AggregateRow> rows;
    std::size_t failed_trials = 0;
};

/// Seed of trial `trial` under master seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// `trials` independent runs with derived seeds, aggregated per iteration.
/// Failed trials are excluded from the statistics and counted.
EnsembleReport run_ensemble(const RunConfig& cfg, std::size_t trials, std::size_t threads = 1);

/// Per-iteration statistics over the successful traces.
std::vector<AggregateRow> aggregate(const std::vector<RunTrace>& traces);

struct CompareRow {
    std::size_t iteration = 0;
    double mean_expected_G_a = 0.0;
    double mean_expected_G_b = 0.0;
    double delta_mean = 0.0;           // b - a
    double paired_delta_ci95 = 0.0;
    std::size_t b_better = 0;           // paired seeds with b strictly lower
    std::size_t pairs = 0;
};

struct CompareReport {
    EnsembleReport a;
    EnsembleReport b;
    std::vector<CompareRow> rows;
};

/// Runs both configs on the same trial seeds (derived from a.seed) and
/// reports paired per-iteration differences.
CompareReport compare_configs(const RunConfig& a, const RunConfig& b, std::size_t trials, std::size_t threads = 1);

std::string to_string(BetaPolicy p);
std::string to_string(ModelPolicy p);

}  // namespace pcopt
