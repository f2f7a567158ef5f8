#include "pcopt/estimation.hpp"

#include "pcopt/error.hpp"

#include <cmath>
#include <limits>

namespace pcopt {

double WeightVector::max_log() const {
    if (log_weights.size() == 0) throw Error(Errc::empty_sample, "empty weight vector");
    return log_weights.maxCoeff();
}

Eigen::VectorXd WeightVector::normalized() const {
    const double top = max_log();
    if (!std::isfinite(top)) throw Error(Errc::degenerate_weights, "all Boltzmann weights vanish");
    Eigen::VectorXd w = exp_shifted(log_weights, top);
    return w / w.sum();
}

double WeightVector::log_total() const { return log_sum_exp(log_weights); }

WeightVector WeightVector::subset(std::span<const Eigen::Index> indices) const {
    WeightVector out{Eigen::VectorXd(static_cast<Eigen::Index>(indices.size())), beta};
    for (std::size_t j = 0; j < indices.size(); ++j) out.log_weights[static_cast<Eigen::Index>(j)] = log_weights[indices[j]];
    return out;
}

WeightVector boltzmann_weights(const SampleSet& data, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_input, "beta must be finite and >= 0");
    WeightVector w{Eigen::VectorXd(data.size()), beta};
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double g = data.value(i);
        if (!std::isfinite(g)) {
            throw Error(Errc::evaluation_failure, "objective value of row " + std::to_string(i) + " is not finite");
        }
        w.log_weights[i] = -beta * g - std::log(data.proposal_density(i));
    }
    return w;
}

double importance_estimate(std::span<const double> integrand_over_h) {
    if (integrand_over_h.empty()) throw Error(Errc::empty_sample, "importance_estimate needs at least one value");
    double sum = 0.0;
    for (double v : integrand_over_h) {
        if (!std::isfinite(v)) throw Error(Errc::invalid_input, "importance ratio is not finite");
        sum += v;
    }
    return sum / static_cast<double>(integrand_over_h.size());
}

std::vector<double> optimal_importance_density(std::span<const double> f_values,
                                               std::span<const double> cell_volumes) {
    if (f_values.empty()) throw Error(Errc::invalid_input, "grid is empty");
    if (f_values.size() != cell_volumes.size()) throw Error(Errc::invalid_input, "grid and volumes differ in length");
    double mass = 0.0;
    for (std::size_t k = 0; k < f_values.size(); ++k) {
        if (!(cell_volumes[k] > 0.0)) throw Error(Errc::invalid_input, "cell volumes must be positive");
        mass += std::abs(f_values[k]) * cell_volumes[k];
    }
    if (!(mass > 0.0)) throw Error(Errc::undefined_density, "integrand is zero on every cell");
    std::vector<double> out(f_values.size());
    for (std::size_t k = 0; k < f_values.size(); ++k) out[k] = std::abs(f_values[k]) / mass;
    return out;
}

double estimate_expected_G(const MixtureModel& model, const SampleSet& data) {
    if (data.empty()) throw Error(Errc::empty_sample, "estimate_expected_G needs data");
    if (model.dimension() != data.dimension()) throw Error(Errc::dimension_mismatch, "model and data differ in dimension");
    Eigen::VectorXd log_ratio(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        log_ratio[i] = model.log_density(data.point(i)) - std::log(data.proposal_density(i));
    }
    const double top = log_ratio.maxCoeff();
    if (!std::isfinite(top)) throw Error(Errc::degenerate_overlap, "model has no overlap with the data");
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double r = std::exp(log_ratio[i] - top);
        num += r * data.value(i);
        den += r;
    }
    return num / den;
}

double plug_in_estimate(const MixtureModel& model, const SampleSet& data) {
    if (data.empty()) throw Error(Errc::empty_sample, "plug_in_estimate needs data");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        sum += std::exp(model.log_density(data.point(i)) - std::log(data.proposal_density(i))) * data.value(i);
    }
    return sum / static_cast<double>(data.size());
}

std::size_t naive_mco_argmin(std::span<const MixtureModel> candidates, const SampleSet& data) {
    if (candidates.empty()) throw Error(Errc::invalid_input, "naive_mco_argmin needs candidates");
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double v = plug_in_estimate(candidates[c], data);
        if (v < best_value) {
            best_value = v;
            best = c;
        }
    }
    return best;
}

DecompositionReport bias_variance_decompose(std::span<const double> estimates, double true_value) {
    if (estimates.size() < 2) throw Error(Errc::insufficient_sample, "decomposition needs at least two estimates");
    const auto m = static_cast<double>(estimates.size());
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= m;
    double variance = 0.0;
    double mse = 0.0;
    for (double e : estimates) {
        variance += (e - mean) * (e - mean);
        mse += (e - true_value) * (e - true_value);
    }
    return {(mean - true_value) * (mean - true_value), variance / m, mse / m};
}

}  // namespace pcopt
