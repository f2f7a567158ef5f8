#pragma once

#include "pcopt/estimation.hpp"
#include "pcopt/models.hpp"
#include "pcopt/rng.hpp"
#include "pcopt/sample_set.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pcopt {

struct EmConfig {
    std::size_t components = 1;
    std::size_t max_iterations = 100;
    /// Stop once one EM iteration lowers the normalized weighted NLL by less.
    double nll_tolerance = 1e-6;
    std::size_t restarts = 4;
    /// Absolute covariance floor; the effective floor is
    /// max(covariance_floor, relative_covariance_floor * trace(Sigma_global) / n).
    double covariance_floor = 1e-10;
    double relative_covariance_floor = 1e-6;

    void validate() const;
};

struct FitReport {
    MixtureModel model;
    /// Weighted NLL of `model` with the weights rescaled to sum to one.
    double final_weighted_nll = 0.0;
    std::size_t iterations_used = 0;
    std::size_t restart_index = 0;
    std::size_t degeneracies_repaired = 0;
    /// Normalized weighted NLL before the first M-step and after each one,
    /// for every restart in order.
    std::vector<std::vector<double>> nll_traces;
};

/// -sum_i s_i log q(x_i), with s_i = exp(log_weights_i). Zero-weight rows
/// contribute nothing; a row with s_i > 0 and q(x_i) = 0 throws
/// infinite_objective.
double weighted_nll(const MixtureModel& model, const SampleSet& data, const WeightVector& w);

/// weighted_nll with the weights rescaled to sum to one.
double normalized_weighted_nll(const MixtureModel& model, const SampleSet& data, const WeightVector& w);

/// Weighted mean and weighted population covariance (the minimizer of
/// weighted_nll over single Gaussians), with the covariance floor applied.
Gaussian fit_gaussian_closed_form(const SampleSet& data, const WeightVector& w, const EmConfig& cfg = {});

/// Weighted EM for a cfg.components-Gaussian mixture, best of cfg.restarts
/// random initializations.
FitReport fit_mixture_em(const SampleSet& data, const WeightVector& w, const EmConfig& cfg, Rng& rng);

/// Posterior component memberships p(z = j | x).
Eigen::VectorXd em_responsibilities(const MixtureModel& model, const PointRef& x);

}  // namespace pcopt
