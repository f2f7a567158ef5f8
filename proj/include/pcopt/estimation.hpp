#pragma once

#include "pcopt/models.hpp"
#include "pcopt/sample_set.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace pcopt {

/// Boltzmann likelihood ratios s_i = exp(-beta G_i) / h_i, kept as logs.
struct WeightVector {
    Eigen::VectorXd log_weights;
    double beta = 0.0;

    [[nodiscard]] Eigen::Index size() const noexcept { return log_weights.size(); }
    [[nodiscard]] double max_log() const;
    /// s_i / sum_j s_j, computed with a max shift.
    [[nodiscard]] Eigen::VectorXd normalized() const;
    /// log(sum_i s_i).
    [[nodiscard]] double log_total() const;
    [[nodiscard]] WeightVector subset(std::span<const Eigen::Index> indices) const;
};

WeightVector boltzmann_weights(const SampleSet& data, double beta);

/// Plain mean of f(x_i)/h(x_i).
double importance_estimate(std::span<const double> integrand_over_h);

/// h*_k = |f_k| / sum_j |f_j| vol_j on an explicit grid of cells.
std::vector<double> optimal_importance_density(std::span<const double> f_values,
                                               std::span<const double> cell_volumes);

/// Self-normalized estimate of E_q[G]:
/// sum(q G / h) / sum(q / h) over the data, in log space.
double estimate_expected_G(const MixtureModel& model, const SampleSet& data);

/// Unnormalized plug-in estimate (1/m) sum q(x_i) G_i / h_i.
double plug_in_estimate(const MixtureModel& model, const SampleSet& data);

/// Index of the candidate minimizing the plug-in estimate; ties go to the
/// lowest index.
std::size_t naive_mco_argmin(std::span<const MixtureModel> candidates, const SampleSet& data);

struct DecompositionReport {
    double bias_squared = 0.0;
    double variance = 0.0;
    double mse = 0.0;
};

/// Population variance, squared bias and MSE of an estimator ensemble.
DecompositionReport bias_variance_decompose(std::span<const double> estimates, double true_value);

}  // namespace pcopt
