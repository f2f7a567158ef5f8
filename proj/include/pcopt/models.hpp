#pragma once

#include "pcopt/objectives.hpp"
#include "pcopt/rng.hpp"
#include "pcopt/sample_set.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace pcopt {

/// Multivariate normal N(mean, covariance) with a cached Cholesky factor.
/// Construction fails with model_degeneracy unless the covariance is
/// symmetric and positive definite.
class Gaussian {
public:
    Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

    [[nodiscard]] Eigen::Index dimension() const noexcept { return mean_.size(); }
    [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
    [[nodiscard]] const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
    [[nodiscard]] const Eigen::MatrixXd& cholesky_factor() const noexcept { return lower_; }

    [[nodiscard]] double log_density(const PointRef& x) const;
    [[nodiscard]] double density(const PointRef& x) const;
    [[nodiscard]] Point sample(Rng& rng) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd lower_;
    double log_normalizer_ = 0.0;  // -(n log 2pi + log det) / 2
};

/// q(x) = sum_j phi_j N(x; mu_j, Sigma_j). Immutable once built.
class MixtureModel {
public:
    /// Weights must be nonnegative and sum to 1 within 1e-12.
    MixtureModel(std::vector<Gaussian> components, Eigen::VectorXd weights);
    explicit MixtureModel(Gaussian single);

    [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return components_.front().dimension(); }
    [[nodiscard]] const std::vector<Gaussian>& components() const noexcept { return components_; }
    [[nodiscard]] const Gaussian& component(std::size_t j) const { return components_.at(j); }
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }

    [[nodiscard]] double density(const PointRef& x) const;
    /// log q(x) via log-sum-exp over components.
    [[nodiscard]] double log_density(const PointRef& x) const;
    /// log(phi_j) + log N(x; mu_j, Sigma_j) for each j; -inf for zero weights.
    [[nodiscard]] Eigen::VectorXd component_log_joint(const PointRef& x) const;

    /// Two-stage draw: categorical over phi, then the chosen component.
    [[nodiscard]] Point sample(Rng& rng) const;

    /// Versioned plain-text form; round-trips exactly.
    [[nodiscard]] std::string serialize() const;
    static MixtureModel parse(std::string_view text);

private:
    std::vector<Gaussian> components_;
    Eigen::VectorXd weights_;
};

/// Axis-aligned search box.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    [[nodiscard]] Eigen::Index dimension() const noexcept { return lower.size(); }
    /// Throws invalid_domain for empty, non-finite or zero-width boxes.
    void validate() const;
    [[nodiscard]] double volume() const;

    static Box cube(Eigen::Index n, double lo, double hi);
};

/// m i.i.d. draws from `model`, each tagged with the full mixture density.
ProposalDraw draw_samples(const MixtureModel& model, Eigen::Index m, Rng& rng);

/// m uniform draws in `bounds`, each tagged with 1 / volume.
ProposalDraw uniform_initial_proposal(const Box& bounds, Eigen::Index m, Rng& rng);

/// log(sum exp(v)) with max shift; -inf for an all -inf input.
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

/// exp(v - shift) elementwise; -inf maps to exactly 0, which the
/// vectorized Eigen exp does not guarantee.
Eigen::VectorXd exp_shifted(const Eigen::Ref<const Eigen::VectorXd>& v, double shift);

}  // namespace pcopt
