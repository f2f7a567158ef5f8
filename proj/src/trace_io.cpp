#include "pcopt/trace_io.hpp"

#include "pcopt/config.hpp"
#include "pcopt/error.hpp"
#include "pcopt/text.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace pcopt {

using nlohmann::json;
using text::format_double;

namespace {

json cv_json(const CvScores& cv) {
    json scores = json::array();
    for (double s : cv.mean_scores) scores.push_back(format_double(s));
    json folds = json::array();
    for (const auto& row : cv.fold_scores) {
        json r = json::array();
        for (double s : row) r.push_back(format_double(s));
        folds.push_back(r);
    }
    return {{"candidates", cv.candidates}, {"mean_scores", scores}, {"fold_scores", folds},
            {"chosen", cv.chosen()}};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw Error(Errc::io_error, "write to '" + path.string() + "' failed");
}

}  // namespace

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
    out << "iter,beta,M,evals,expected_G,best_G\n";
    for (const auto& r : trace.records) {
        out << r.iteration << ',' << format_double(r.beta) << ',' << r.model_components << ',' << r.evaluations << ','
            << format_double(r.expected_G) << ',' << format_double(r.best_G) << '\n';
    }
}

void write_samples_csv(const RunTrace& trace, std::ostream& out) {
    const auto& s = trace.samples;
    out << "origin,";
    for (Eigen::Index d = 0; d < s.dimension(); ++d) out << 'x' << d << ',';
    out << "G,h\n";
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out << trace.sample_origin[static_cast<std::size_t>(i)] << ',';
        for (Eigen::Index d = 0; d < s.dimension(); ++d) out << format_double(s.point(i)[d]) << ',';
        out << format_double(s.value(i)) << ',' << format_double(s.proposal_density(i)) << '\n';
    }
}

std::string trace_to_json(const RunTrace& trace) {
    json root;
    root["format"] = "pcopt-trace";
    root["version"] = 1;
    root["config"] = json::parse(config_to_json(trace.config));
    json records = json::array();
    for (const auto& r : trace.records) {
        json rec = {{"iter", r.iteration},
                    {"beta_center", r.beta_center},
                    {"beta", r.beta},
                    {"M", r.model_components},
                    {"mixture_components", r.mixture_components},
                    {"evals", r.evaluations},
                    {"expected_G", format_double(r.expected_G)},
                    {"best_G", r.best_G},
                    {"fit_nll", format_double(r.fit_nll)},
                    {"model", r.model}};
        if (r.beta_cv) rec["beta_cv"] = cv_json(*r.beta_cv);
        if (r.model_cv) rec["model_cv"] = cv_json(*r.model_cv);
        if (!r.stacking_weights.empty()) rec["stacking_weights"] = r.stacking_weights;
        records.push_back(std::move(rec));
    }
    root["records"] = std::move(records);
    root["evaluations_per_iteration"] = trace.evaluations_per_iteration;
    root["diagnostic_evaluations"] = trace.diagnostic_evaluations;
    root["sample_count"] = trace.samples.size();
    root["failed"] = trace.failed;
    root["failure"] = trace.failure;
    root["final_model"] = trace.final_model ? json(trace.final_model->serialize()) : json(nullptr);
    return root.dump(2) + "\n";
}

void write_run_files(const RunTrace& trace, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create '" + dir.string() + "': " + ec.message());
    write_file(dir / "trace.json", trace_to_json(trace));
    std::ostringstream csv, samples;
    write_trace_csv(trace, csv);
    write_samples_csv(trace, samples);
    write_file(dir / "trace.csv", csv.str());
    write_file(dir / "samples.csv", samples.str());
    write_file(dir / "timing.txt", "wall_time_seconds " + format_double(trace.wall_time_seconds) + "\n");
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
    out << "iter,mean_beta,mean_evals,mean_expected_G,ci95_halfwidth,median_expected_G,median_best_G,trials_ok\n";
    for (const auto& r : rows) {
        out << r.iteration << ',' << format_double(r.mean_beta) << ',' << format_double(r.mean_evaluations) << ','
            << format_double(r.mean_expected_G) << ',' << format_double(r.ci95_halfwidth) << ','
            << format_double(r.median_expected_G) << ',' << format_double(r.median_best_G) << ',' << r.trials_ok
            << '\n';
    }
}

void write_compare_csv(const std::vector<CompareRow>& rows, std::ostream& out) {
    out << "iter,mean_expected_G_a,mean_expected_G_b,delta_mean,paired_delta_ci95,b_better,pairs\n";
    for (const auto& r : rows) {
        out << r.iteration << ',' << format_double(r.mean_expected_G_a) << ',' << format_double(r.mean_expected_G_b)
            << ',' << format_double(r.delta_mean) << ',' << format_double(r.paired_delta_ci95) << ',' << r.b_better
            << ',' << r.pairs << '\n';
    }
}

std::string schedule_to_json(const ScheduleFit& fit) {
    json root = {{"nonlinear", {{"beta0", fit.nonlinear.beta0}, {"k_beta", fit.nonlinear.k_beta}}},
                 {"log_linear", {{"beta0", fit.log_linear.beta0}, {"k_beta", fit.log_linear.k_beta}}}};
    return root.dump(2) + "\n";
}

}  // namespace pcopt
