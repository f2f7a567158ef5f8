#pragma once

#include "pcopt/optimizer.hpp"
#include "pcopt/schedule.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pcopt {

/// Columnar per-iteration file: iter,beta,M,evals,expected_G,best_G.
void write_trace_csv(const RunTrace& trace, std::ostream& out);

/// origin,x0..x{n-1},G,h for every sample of the run, in draw order.
void write_samples_csv(const RunTrace& trace, std::ostream& out);

/// Structured trace: config echo, per-iteration records with CV tables and
/// serialized models, ledger counts, failure status. Wall time is left out
/// so that identical runs produce identical bytes.
std::string trace_to_json(const RunTrace& trace);

/// trace.json, trace.csv, samples.csv and timing.txt under `dir`.
void write_run_files(const RunTrace& trace, const std::filesystem::path& dir);

/// iter,mean_beta,mean_evals,mean_expected_G,ci95_halfwidth,median_expected_G,median_best_G,trials_ok
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);

/// iter,mean_expected_G_a,mean_expected_G_b,delta_mean,paired_delta_ci95,b_better,pairs
void write_compare_csv(const std::vector<CompareRow>& rows, std::ostream& out);

std::string schedule_to_json(const ScheduleFit& fit);

}  // namespace pcopt
