#include "pcopt/cli.hpp"

#include "pcopt/config.hpp"
#include "pcopt/error.hpp"
#include "pcopt/objectives.hpp"
#include "pcopt/optimizer.hpp"
#include "pcopt/schedule.hpp"
#include "pcopt/text.hpp"
#include "pcopt/trace_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pcopt {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::vector<std::string> configs;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 50;
    std::size_t threads = 1;
    std::string out_dir;
};

RunConfig load_with_overrides(const std::string& path, const Options& opt) {
    auto cfg = load_config(path);
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

void write_to(const fs::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
    f << contents;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create '" + dir.string() + "': " + ec.message());
}

void write_ensemble(const EnsembleReport& report, const fs::path& dir) {
    ensure_dir(dir);
    std::ostringstream agg;
    write_aggregate_csv(report.rows, agg);
    write_to(dir / "aggregate.csv", agg.str());
    for (std::size_t i = 0; i < report.traces.size(); ++i) {
        std::ostringstream name;
        name << "trial_" << std::setw(3) << std::setfill('0') << i;
        write_run_files(report.traces[i], dir / name.str());
    }
}

void summarize(const EnsembleReport& report, std::ostream& out) {
    if (report.rows.empty()) {
        out << "no successful trials\n";
        return;
    }
    const auto& last = report.rows.back();
    out << "trials " << report.traces.size() << " failed " << report.failed_trials << " final mean_expected_G "
        << text::format_double(last.mean_expected_G) << " +/- " << text::format_double(last.ci95_halfwidth)
        << " median_best_G " << text::format_double(last.median_best_G) << '\n';
}

int run_command(const Options& opt, std::ostream& out) {
    const auto cfg = load_with_overrides(opt.configs.at(0), opt);
    const auto trace = pc_optimize(cfg);
    if (opt.out_dir.empty()) {
        write_trace_csv(trace, out);
    } else {
        write_run_files(trace, opt.out_dir);
        out << "wrote " << trace.records.size() << " iterations to " << opt.out_dir << '\n';
    }
    if (trace.failed) throw Error(Errc::fit_failure, "run aborted: " + trace.failure);
    return 0;
}

int ensemble_command(const Options& opt, std::ostream& out) {
    const auto cfg = load_with_overrides(opt.configs.at(0), opt);
    const auto report = run_ensemble(cfg, opt.trials, opt.threads);
    if (opt.out_dir.empty()) {
        write_aggregate_csv(report.rows, out);
    } else {
        write_ensemble(report, opt.out_dir);
    }
    summarize(report, out);
    return 0;
}

int compare_command(const Options& opt, std::ostream& out) {
    if (opt.configs.size() != 2) throw Error(Errc::config_error, "compare needs exactly two --config files");
    const auto a = load_with_overrides(opt.configs[0], opt);
    const auto b = load_with_overrides(opt.configs[1], opt);
    const auto report = compare_configs(a, b, opt.trials, opt.threads);
    std::ostringstream csv;
    write_compare_csv(report.rows, csv);
    if (opt.out_dir.empty()) {
        out << csv.str();
    } else {
        const fs::path dir(opt.out_dir);
        ensure_dir(dir);
        write_to(dir / "compare.csv", csv.str());
        write_ensemble(report.a, dir / "a");
        write_ensemble(report.b, dir / "b");
    }
    out << "a: ";
    summarize(report.a, out);
    out << "b: ";
    summarize(report.b, out);
    return 0;
}

int schedule_command(const Options& opt, std::ostream& out) {
    const auto cfg = load_with_overrides(opt.configs.at(0), opt);
    const auto report = run_ensemble(cfg, opt.trials, opt.threads);
    std::vector<RunTrace> ok;
    for (const auto& t : report.traces) {
        if (!t.failed) ok.push_back(t);
    }
    const auto fit = fit_geometric_schedule(ok);
    const auto json = schedule_to_json(fit);
    if (!opt.out_dir.empty()) {
        ensure_dir(opt.out_dir);
        write_to(fs::path(opt.out_dir) / "schedule.json", json);
    }
    out << json;
    return 0;
}

int bench_command(std::ostream& out) {
    for (const auto& name : objective_names()) {
        const auto spec = make_objective(name);
        out << name << " dimension " << spec.dimension << " noise_stddev " << text::format_double(spec.noise_stddev)
            << '\n';
    }
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probability Collectives black-box optimizer"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool two_configs) {
        auto* c = sub->add_option("--config", opt.configs, "JSON run configuration")->required();
        if (two_configs) {
            c->expected(2);
        } else {
            c->expected(1);
        }
        sub->add_option("--seed", opt.seed, "override the configured seed");
        sub->add_option("--out", opt.out_dir, "output directory");
    };
    auto* run = app.add_subcommand("run", "one optimization run");
    add_common(run, false);
    auto* ens = app.add_subcommand("ensemble", "independent seeded trials with per-iteration aggregates");
    add_common(ens, false);
    ens->add_option("--trials", opt.trials, "number of trials")->check(CLI::Range(2, 100000));
    ens->add_option("--threads", opt.threads, "worker threads");
    auto* cmp = app.add_subcommand("compare", "paired comparison of two configurations");
    add_common(cmp, true);
    cmp->add_option("--trials", opt.trials, "number of trials")->check(CLI::Range(2, 100000));
    cmp->add_option("--threads", opt.threads, "worker threads");
    auto* sch = app.add_subcommand("schedule", "best-fit geometric beta schedule of an ensemble");
    add_common(sch, false);
    sch->add_option("--trials", opt.trials, "number of trials")->check(CLI::Range(2, 100000));
    sch->add_option("--threads", opt.threads, "worker threads");
    app.add_subcommand("bench", "list available objectives");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (run->parsed()) return run_command(opt, out);
        if (ens->parsed()) return ensemble_command(opt, out);
        if (cmp->parsed()) return compare_command(opt, out);
        if (sch->parsed()) return schedule_command(opt, out);
        return bench_command(out);
    } catch (const std::exception& e) {
        err << "pcopt: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace pcopt
