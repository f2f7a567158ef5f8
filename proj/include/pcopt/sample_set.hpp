#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pcopt {

/// Points drawn from a proposal, each tagged with the proposal density it
/// was drawn from. Objective values are attached later.
struct ProposalDraw {
    Eigen::MatrixXd points;                // n x m, one column per draw
    Eigen::VectorXd proposal_densities;    // h(x_i)
};

/// Evaluated design points: columns of `points`, their objective values and
/// the density h(x_i) of the distribution each was sampled from.
class SampleSet {
public:
    SampleSet() = default;

    /// Throws invalid_input unless the three columns agree in length, m >= 1,
    /// and every h is strictly positive and finite.
    SampleSet(Eigen::MatrixXd points, Eigen::VectorXd objective_values,
              Eigen::VectorXd proposal_densities);

    SampleSet(const ProposalDraw& draw, Eigen::VectorXd objective_values);

    [[nodiscard]] Eigen::Index size() const noexcept { return points_.cols(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return points_.rows(); }
    [[nodiscard]] bool empty() const noexcept { return points_.cols() == 0; }

    [[nodiscard]] const Eigen::MatrixXd& points() const noexcept { return points_; }
    [[nodiscard]] const Eigen::VectorXd& objective_values() const noexcept { return values_; }
    [[nodiscard]] const Eigen::VectorXd& proposal_densities() const noexcept { return densities_; }

    [[nodiscard]] auto point(Eigen::Index i) const { return points_.col(i); }
    [[nodiscard]] double value(Eigen::Index i) const { return values_[i]; }
    [[nodiscard]] double proposal_density(Eigen::Index i) const { return densities_[i]; }

    /// Rows in the given order; indices may repeat (bootstrap resamples).
    [[nodiscard]] SampleSet subset(std::span<const Eigen::Index> indices) const;

    /// Appends the rows of `other`; an empty set adopts other's dimension.
    void append(const SampleSet& other);

    /// One row per sample: coordinates, G, h. Header names x0..x{n-1},G,h.
    void write_columns(std::ostream& out) const;
    static SampleSet read_columns(std::istream& in);

private:
    Eigen::MatrixXd points_;
    Eigen::VectorXd values_;
    Eigen::VectorXd densities_;
};

}  // namespace pcopt
