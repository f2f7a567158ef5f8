#include "pcopt/optimizer.hpp"

#include "pcopt/error.hpp"
#include "pcopt/estimation.hpp"
#include "pcopt/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace pcopt {

namespace {

// Independent streams inside one run.
enum Stream : std::uint64_t { kSampling = 1, kNoise = 2, kFitting = 3, kDiagnostic = 4, kDiagnosticNoise = 5 };

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Sample mean and 1.96 * sd / sqrt(n), sd with the n - 1 denominator.
std::pair<double, double> mean_ci95(const std::vector<double>& v) {
    const auto n = static_cast<double>(v.size());
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

Eigen::VectorXd evaluate_all(const ObjectiveSpec& spec, const Eigen::MatrixXd& points, Rng& rng,
                             EvaluationLedger& ledger) {
    Eigen::VectorXd g(points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) g[i] = evaluate(spec, points.col(i), rng, ledger);
    return g;
}

std::vector<std::size_t> component_range(std::size_t max_components) {
    std::vector<std::size_t> out(max_components);
    std::iota(out.begin(), out.end(), std::size_t{1});
    return out;
}

}  // namespace

std::string to_string(BetaPolicy p) {
    switch (p) {
        case BetaPolicy::cross_validate: return "cross-validate";
        case BetaPolicy::geometric: return "geometric";
        case BetaPolicy::fixed: return "fixed";
    }
    return "?";
}

std::string to_string(ModelPolicy p) {
    switch (p) {
        case ModelPolicy::single_gaussian: return "single-gaussian";
        case ModelPolicy::fixed_m: return "fixed-M";
        case ModelPolicy::cv_model_select: return "cv-model-select";
        case ModelPolicy::stacking: return "stacking";
    }
    return "?";
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::config_error, what); };
    const auto spec = objective_spec();
    if (samples_per_iteration < 1) fail("samples_per_iteration must be >= 1");
    if (iterations < 1) fail("iterations must be >= 1");
    if (!(initial_beta > 0.0) || !std::isfinite(initial_beta)) fail("initial_beta must be positive");
    if (beta_policy == BetaPolicy::geometric && !(k_beta > 1.0)) fail("geometric beta policy needs k_beta > 1");
    if (fold_count < 2) fail("fold_count must be >= 2");
    if (model_policy == ModelPolicy::fixed_m && components < 1) fail("components must be >= 1");
    if ((model_policy == ModelPolicy::cv_model_select || model_policy == ModelPolicy::stacking) && max_components < 1) {
        fail("max_components must be >= 1");
    }
    if (model_policy == ModelPolicy::stacking && max_components < 2) fail("stacking needs max_components >= 2");
    try {
        beta_grid.validate();
        em.validate();
        const auto b = box();
        b.validate();
        if (b.dimension() != static_cast<Eigen::Index>(spec.dimension)) fail("search_box dimension does not match objective");
    } catch (const Error& e) {
        if (e.code() == Errc::config_error) throw;
        fail(e.what());
    }
}

ObjectiveSpec RunConfig::objective_spec() const { return make_objective(objective, noise_stddev, classical_woods); }

Box RunConfig::box() const {
    if (search_box) return *search_box;
    return Box::cube(static_cast<Eigen::Index>(objective_spec().dimension), -5.0, 5.0);
}

double update_beta_geometric(double beta, double k_beta) {
    if (!(k_beta > 1.0)) throw Error(Errc::invalid_input, "geometric annealing needs k_beta > 1");
    return k_beta * beta;
}

RunTrace pc_optimize(const RunConfig& cfg) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto spec = cfg.objective_spec();

    Rng sampling(derive_seed(cfg.seed, kSampling));
    Rng noise(derive_seed(cfg.seed, kNoise));
    Rng fitting(derive_seed(cfg.seed, kFitting));
    Rng diagnostic(derive_seed(cfg.seed, kDiagnostic));
    Rng diagnostic_noise(derive_seed(cfg.seed, kDiagnosticNoise));
    EvaluationLedger budget;
    EvaluationLedger diagnostics;

    RunTrace trace;
    trace.config = cfg;

    double beta = cfg.initial_beta;
    std::size_t current_m = cfg.model_policy == ModelPolicy::fixed_m ? cfg.components : 1;
    // Bagging wraps the final fit only; CV sweeps score plain fits.
    const CvOptions opts{cfg.em, cfg.threads, 0};
    const CvOptions final_opts{cfg.em, cfg.threads, cfg.bagging};

    try {
        const auto initial_count = static_cast<Eigen::Index>(cfg.initial_samples > 0 ? cfg.initial_samples : cfg.samples_per_iteration);
        const auto initial = uniform_initial_proposal(cfg.box(), initial_count, sampling);
        trace.samples = SampleSet(initial, evaluate_all(spec, initial.points, noise, budget));
        trace.sample_origin.assign(static_cast<std::size_t>(initial_count), 0);
        SampleSet latest = trace.samples;
        double best = trace.samples.objective_values().minCoeff();

        for (std::size_t t = 0; t < cfg.iterations; ++t) {
            if (cfg.max_evaluations > 0 && budget.total() + cfg.samples_per_iteration > cfg.max_evaluations) break;
            budget.begin_iteration();
            const SampleSet& data = cfg.fresh_samples_only ? latest : trace.samples;

            IterationRecord rec;
            rec.iteration = t;
            rec.beta_center = beta;

            std::optional<FoldPlan> folds;
            auto fold_plan = [&]() -> const FoldPlan& {
                if (!folds) folds = make_folds(data, std::min<std::size_t>(cfg.fold_count, static_cast<std::size_t>(data.size())), fitting);
                return *folds;
            };

            double beta_used = beta;
            if (cfg.beta_policy == BetaPolicy::cross_validate) {
                CvOptions o = opts;
                o.em.components = current_m;
                rec.beta_cv = cross_validate_beta(data, beta, cfg.beta_grid, fold_plan(), o, fitting);
                beta_used = rec.beta_cv->chosen();
            }
            rec.beta = beta_used;
            const WeightVector w = boltzmann_weights(data, beta_used);

            std::optional<MixtureModel> model;
            switch (cfg.model_policy) {
                case ModelPolicy::single_gaussian: current_m = 1; break;
                case ModelPolicy::fixed_m: current_m = cfg.components; break;
                case ModelPolicy::cv_model_select:
                case ModelPolicy::stacking: {
                    rec.model_cv = cross_validate_model(data, w, component_range(cfg.max_components), fold_plan(), opts, fitting);
                    current_m = static_cast<std::size_t>(rec.model_cv->chosen());
                    break;
                }
            }
            if (cfg.model_policy == ModelPolicy::stacking) {
                std::vector<MixtureModel> members;
                std::vector<double> scores;
                for (std::size_t c = 0; c < rec.model_cv->candidates.size(); ++c) {
                    if (!std::isfinite(rec.model_cv->mean_scores[c])) continue;
                    CvOptions o = final_opts;
                    o.em.components = static_cast<std::size_t>(rec.model_cv->candidates[c]);
                    members.push_back(fit_weighted(data, w, o, fitting));
                    scores.push_back(rec.model_cv->mean_scores[c]);
                }
                auto ensemble = stack_by_scores(std::move(members), scores);
                rec.stacking_weights.assign(ensemble.member_weights().data(),
                                            ensemble.member_weights().data() + ensemble.member_weights().size());
                model = ensemble.flatten();
            } else {
                CvOptions o = final_opts;
                o.em.components = current_m;
                model = fit_weighted(data, w, o, fitting);
            }
            rec.model_components = current_m;
            rec.mixture_components = model->size();
            rec.fit_nll = normalized_weighted_nll(*model, data, w);

            if (cfg.diagnostic_sample_count > 0) {
                const auto probe = draw_samples(*model, static_cast<Eigen::Index>(cfg.diagnostic_sample_count), diagnostic);
                const SampleSet probe_set(probe, evaluate_all(spec, probe.points, diagnostic_noise, diagnostics));
                rec.expected_G = estimate_expected_G(*model, probe_set);
            } else {
                rec.expected_G = std::numeric_limits<double>::quiet_NaN();
            }

            const auto draw = draw_samples(*model, static_cast<Eigen::Index>(cfg.samples_per_iteration), sampling);
            latest = SampleSet(draw, evaluate_all(spec, draw.points, noise, budget));
            trace.samples.append(latest);
            trace.sample_origin.insert(trace.sample_origin.end(), cfg.samples_per_iteration, t + 1);
            best = std::min(best, latest.objective_values().minCoeff());

            rec.evaluations = budget.total();
            rec.best_G = best;
            rec.model = model->serialize();
            trace.final_model = std::move(model);
            trace.records.push_back(std::move(rec));

            switch (cfg.beta_policy) {
                case BetaPolicy::cross_validate: beta = beta_used; break;
                case BetaPolicy::geometric: beta = update_beta_geometric(beta, cfg.k_beta); break;
                case BetaPolicy::fixed: break;
            }
        }
    } catch (const Error& e) {
        trace.failed = true;
        trace.failure = std::string(to_string(e.code())) + ": " + e.what();
    }

    trace.evaluations_per_iteration = budget.per_iteration();
    trace.diagnostic_evaluations = diagnostics.total();
    trace.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return trace;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, 1000003ULL + trial); }

std::vector<AggregateRow> aggregate(const std::vector<RunTrace>& traces) {
    std::size_t length = 0;
    for (const auto& t : traces) {
        if (!t.failed) length = std::max(length, t.records.size());
    }
    std::vector<AggregateRow> rows;
    for (std::size_t it = 0; it < length; ++it) {
        std::vector<double> eg, bg, beta, evals;
        for (const auto& t : traces) {
            if (t.failed || it >= t.records.size()) continue;
            const auto& r = t.records[it];
            eg.push_back(r.expected_G);
            bg.push_back(r.best_G);
            beta.push_back(r.beta);
            evals.push_back(static_cast<double>(r.evaluations));
        }
        AggregateRow row;
        row.iteration = it;
        row.trials_ok = eg.size();
        std::tie(row.mean_expected_G, row.ci95_halfwidth) = mean_ci95(eg);
        row.mean_beta = mean_ci95(beta).first;
        row.mean_evaluations = mean_ci95(evals).first;
        row.median_expected_G = median(eg);
        row.median_best_G = median(bg);
        rows.push_back(row);
    }
    return rows;
}

EnsembleReport run_ensemble(const RunConfig& cfg, std::size_t trials, std::size_t threads) {
    if (trials < 2) throw Error(Errc::invalid_input, "an ensemble needs at least two trials");
    cfg.validate();
    EnsembleReport report;
    report.traces.resize(trials);
    for (std::size_t i = 0; i < trials; ++i) report.seeds.push_back(trial_seed(cfg.seed, i));
    parallel_for(trials, threads, [&](std::size_t i) {
        RunConfig local = cfg;
        local.seed = report.seeds[i];
        report.traces[i] = pc_optimize(local);
    });
    for (const auto& t : report.traces) report.failed_trials += t.failed ? 1 : 0;
    report.rows = aggregate(report.traces);
    return report;
}

CompareReport compare_configs(const RunConfig& a, const RunConfig& b, std::size_t trials, std::size_t threads) {
    RunConfig b_paired = b;
    b_paired.seed = a.seed;
    CompareReport out{run_ensemble(a, trials, threads), run_ensemble(b_paired, trials, threads), {}};
    const auto length = std::min(out.a.rows.size(), out.b.rows.size());
    for (std::size_t it = 0; it < length; ++it) {
        CompareRow row;
        row.iteration = it;
        row.mean_expected_G_a = out.a.rows[it].mean_expected_G;
        row.mean_expected_G_b = out.b.rows[it].mean_expected_G;
        row.delta_mean = row.mean_expected_G_b - row.mean_expected_G_a;
        std::vector<double> deltas;
        for (std::size_t i = 0; i < trials; ++i) {
            const auto& ta = out.a.traces[i];
            const auto& tb = out.b.traces[i];
            if (ta.failed || tb.failed || it >= ta.records.size() || it >= tb.records.size()) continue;
            const double d = tb.records[it].expected_G - ta.records[it].expected_G;
            deltas.push_back(d);
            if (d < 0.0) ++row.b_better;
        }
        row.pairs = deltas.size();
        row.paired_delta_ci95 = mean_ci95(deltas).second;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace pcopt
