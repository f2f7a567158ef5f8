#pragma once

#include "pcopt/estimation.hpp"
#include "pcopt/fitting.hpp"
#include "pcopt/models.hpp"
#include "pcopt/rng.hpp"
#include "pcopt/sample_set.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pcopt {

/// Assignment of each sample to one of k folds.
class FoldPlan {
public:
    FoldPlan(std::size_t fold_count, std::vector<std::size_t> assignments);

    [[nodiscard]] std::size_t fold_count() const noexcept { return k_; }
    [[nodiscard]] const std::vector<std::size_t>& assignments() const noexcept { return assignments_; }
    [[nodiscard]] std::vector<Eigen::Index> held_in(std::size_t fold) const;
    [[nodiscard]] std::vector<Eigen::Index> held_out(std::size_t fold) const;
    [[nodiscard]] std::vector<std::size_t> fold_sizes() const;

private:
    std::size_t k_;
    std::vector<std::size_t> assignments_;
};

/// Random equitable partition of `m` samples into k folds.
FoldPlan make_folds(Eigen::Index m, std::size_t k, Rng& rng);
inline FoldPlan make_folds(const SampleSet& data, std::size_t k, Rng& rng) { return make_folds(data.size(), k, rng); }

/// `count` equally spaced values in [k1 * center, k2 * center].
struct BetaGrid {
    double k1 = 0.5;
    double k2 = 3.0;
    std::size_t count = 5;

    void validate() const;
    [[nodiscard]] std::vector<double> candidates(double center) const;
};

/// Held-out scores of a cross-validation sweep. Failed candidates score +inf.
struct CvScores {
    std::vector<double> candidates;
    std::vector<double> mean_scores;
    std::vector<std::vector<double>> fold_scores;  // [candidate][fold]
    std::size_t chosen_index = 0;

    [[nodiscard]] double chosen() const { return candidates.at(chosen_index); }
};

struct CvOptions {
    EmConfig em;
    std::size_t threads = 1;
    /// Bootstrap replicas per fit; 0 fits the held-in data directly.
    std::size_t bagging = 0;
};

/// Picks beta from the grid around `beta_center` by k-fold held-out
/// estimate_expected_G; ties go to the smaller beta.
CvScores cross_validate_beta(const SampleSet& data, double beta_center, const BetaGrid& grid,
                             const FoldPlan& folds, const CvOptions& opts, Rng& rng);

/// Same protocol with the weights fixed and the component count varying;
/// ties go to the smaller count.
CvScores cross_validate_model(const SampleSet& data, const WeightVector& w,
                              const std::vector<std::size_t>& candidate_counts, const FoldPlan& folds,
                              const CvOptions& opts, Rng& rng);

/// Convex combination of mixture densities.
class EnsembleModel {
public:
    EnsembleModel(std::vector<MixtureModel> members, Eigen::VectorXd member_weights);

    [[nodiscard]] const std::vector<MixtureModel>& members() const noexcept { return members_; }
    [[nodiscard]] const Eigen::VectorXd& member_weights() const noexcept { return weights_; }
    [[nodiscard]] double density(const PointRef& x) const;
    /// Union of all member components with weights w_b * phi_bj.
    [[nodiscard]] MixtureModel flatten() const;

private:
    std::vector<MixtureModel> members_;
    Eigen::VectorXd weights_;
};

/// Fits one mixture to `data` weighted by `w`, bagged when opts.bagging > 0.
MixtureModel fit_weighted(const SampleSet& data, const WeightVector& w, const CvOptions& opts, Rng& rng);

/// B bootstrap resamples (h carried along), each fit by EM at `beta`,
/// combined with uniform weights. Failed members are dropped.
EnsembleModel bagging_fit(const SampleSet& data, double beta, std::size_t replicas, const EmConfig& cfg, Rng& rng);
EnsembleModel bagging_fit(const SampleSet& data, const WeightVector& w, std::size_t replicas, const EmConfig& cfg,
                          Rng& rng);

/// Softmin weights over scores: w_j ∝ exp(-(score_j - min) / T) with T the
/// population standard deviation of the finite scores unless given.
Eigen::VectorXd softmin_weights(const std::vector<double>& scores, std::optional<double> temperature = std::nullopt);

/// Stacks already-fit members by their held-out scores.
EnsembleModel stack_by_scores(std::vector<MixtureModel> members, const std::vector<double>& scores,
                              std::optional<double> temperature = std::nullopt);

/// Scores each member on every fold's held-out rows with
/// estimate_expected_G, averages over folds and stacks by softmin.
EnsembleModel stacking_combine(std::vector<MixtureModel> members, const SampleSet& data, const FoldPlan& folds);

}  // namespace pcopt
