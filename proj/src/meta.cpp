#include "pcopt/meta.hpp"

#include "pcopt/error.hpp"
#include "pcopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace pcopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Lowest finite score; ties keep the earlier (smaller) candidate.
std::size_t argmin_first(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] < scores[best]) best = c;
    }
    return best;
}

/// Fold-by-candidate sweep. `fit` maps (candidate, held-in data, held-in
/// indices, rng) to a model; failures score +inf for that fold.
template <typename Fit>
CvScores sweep(const SampleSet& data, std::vector<double> candidates, const FoldPlan& folds, std::size_t threads,
               Rng& rng, Fit&& fit) {
    if (data.empty()) throw Error(Errc::empty_sample, "cross-validation needs data");
    if (folds.assignments().size() != static_cast<std::size_t>(data.size())) {
        throw Error(Errc::invalid_input, "fold plan does not match the data");
    }
    const std::size_t k = folds.fold_count();
    const std::size_t tasks = candidates.size() * k;
    const std::uint64_t base = rng();
    std::vector<double> scores(tasks, kInf);
    std::vector<std::vector<Eigen::Index>> held_in(k), held_out(k);
    for (std::size_t f = 0; f < k; ++f) {
        held_in[f] = folds.held_in(f);
        held_out[f] = folds.held_out(f);
    }
    parallel_for(tasks, threads, [&](std::size_t t) {
        const std::size_t c = t / k;
        const std::size_t f = t % k;
        if (held_in[f].empty() || held_out[f].empty()) return;
        Rng task_rng(derive_seed(base, t));
        try {
            const auto model = fit(c, data.subset(held_in[f]), held_in[f], task_rng);
            const double score = estimate_expected_G(model, data.subset(held_out[f]));
            if (std::isfinite(score)) scores[t] = score;
        } catch (const Error&) {
            // Scored as +inf.
        }
    });

    CvScores out;
    out.candidates = std::move(candidates);
    out.mean_scores.assign(out.candidates.size(), kInf);
    out.fold_scores.resize(out.candidates.size());
    for (std::size_t c = 0; c < out.candidates.size(); ++c) {
        double sum = 0.0;
        std::size_t ok = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const double s = scores[c * k + f];
            out.fold_scores[c].push_back(s);
            if (std::isfinite(s)) {
                sum += s;
                ++ok;
            }
        }
        if (ok > 0) out.mean_scores[c] = sum / static_cast<double>(ok);
    }
    out.chosen_index = argmin_first(out.mean_scores);
    if (!std::isfinite(out.mean_scores[out.chosen_index])) {
        throw Error(Errc::cv_failure, "every cross-validation candidate failed");
    }
    return out;
}

}  // namespace

FoldPlan::FoldPlan(std::size_t fold_count, std::vector<std::size_t> assignments)
    : k_(fold_count), assignments_(std::move(assignments)) {
    if (k_ < 2) throw Error(Errc::infeasible_folds, "need at least two folds");
    for (auto a : assignments_) {
        if (a >= k_) throw Error(Errc::invalid_input, "fold index out of range");
    }
}

std::vector<Eigen::Index> FoldPlan::held_in(std::size_t fold) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < assignments_.size(); ++i) {
        if (assignments_[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

std::vector<Eigen::Index> FoldPlan::held_out(std::size_t fold) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < assignments_.size(); ++i) {
        if (assignments_[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
    std::vector<std::size_t> sizes(k_, 0);
    for (auto a : assignments_) ++sizes[a];
    return sizes;
}

FoldPlan make_folds(Eigen::Index m, std::size_t k, Rng& rng) {
    if (k < 2) throw Error(Errc::infeasible_folds, "need at least two folds");
    if (m < 0 || k > static_cast<std::size_t>(m)) {
        throw Error(Errc::infeasible_folds, "cannot split " + std::to_string(m) + " samples into " + std::to_string(k) + " folds");
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> assignments(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) assignments[order[pos]] = pos % k;
    return FoldPlan(k, std::move(assignments));
}

void BetaGrid::validate() const {
    if (!(k1 > 0.0) || !(k2 > 0.0)) throw Error(Errc::invalid_input, "beta grid factors must be positive");
    if (count >= 2 && !(k1 < k2)) throw Error(Errc::invalid_input, "beta grid needs k1 < k2");
    if (count < 1) throw Error(Errc::invalid_input, "beta grid needs at least one value");
}

std::vector<double> BetaGrid::candidates(double center) const {
    validate();
    if (!(center > 0.0) || !std::isfinite(center)) throw Error(Errc::invalid_input, "beta center must be positive");
    if (count == 1) return {center};
    std::vector<double> out(count);
    const double lo = k1 * center;
    const double hi = k2 * center;
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    out.back() = hi;
    return out;
}

CvScores cross_validate_beta(const SampleSet& data, double beta_center, const BetaGrid& grid, const FoldPlan& folds,
                             const CvOptions& opts, Rng& rng) {
    auto candidates = grid.candidates(beta_center);
    const auto betas = candidates;
    return sweep(data, std::move(candidates), folds, opts.threads, rng,
                 [&](std::size_t c, const SampleSet& held_in, const std::vector<Eigen::Index>&, Rng& task_rng) {
                     return fit_weighted(held_in, boltzmann_weights(held_in, betas[c]), opts, task_rng);
                 });
}

CvScores cross_validate_model(const SampleSet& data, const WeightVector& w,
                              const std::vector<std::size_t>& candidate_counts, const FoldPlan& folds,
                              const CvOptions& opts, Rng& rng) {
    if (candidate_counts.empty()) throw Error(Errc::invalid_input, "model selection needs candidates");
    if (w.size() != data.size()) throw Error(Errc::invalid_input, "weights and data differ in length");
    std::vector<double> candidates(candidate_counts.begin(), candidate_counts.end());
    return sweep(data, std::move(candidates), folds, opts.threads, rng,
                 [&](std::size_t c, const SampleSet& held_in, const std::vector<Eigen::Index>& idx, Rng& task_rng) {
                     CvOptions local = opts;
                     local.em.components = candidate_counts[c];
                     return fit_weighted(held_in, w.subset(idx), local, task_rng);
                 });
}

EnsembleModel::EnsembleModel(std::vector<MixtureModel> members, Eigen::VectorXd member_weights)
    : members_(std::move(members)), weights_(std::move(member_weights)) {
    if (members_.empty()) throw Error(Errc::invalid_input, "ensemble needs at least one member");
    if (static_cast<std::size_t>(weights_.size()) != members_.size()) {
        throw Error(Errc::invalid_input, "ensemble weight count differs from member count");
    }
    for (const auto& m : members_) {
        if (m.dimension() != members_.front().dimension()) {
            throw Error(Errc::dimension_mismatch, "ensemble members differ in dimension");
        }
    }
    if (!weights_.allFinite() || (weights_.array() < 0.0).any() || std::abs(weights_.sum() - 1.0) > 1e-12) {
        throw Error(Errc::invalid_input, "ensemble weights must be a probability vector");
    }
}

double EnsembleModel::density(const PointRef& x) const {
    double total = 0.0;
    for (std::size_t b = 0; b < members_.size(); ++b) total += weights_[static_cast<Eigen::Index>(b)] * members_[b].density(x);
    return total;
}

MixtureModel EnsembleModel::flatten() const {
    std::vector<Gaussian> comps;
    std::vector<double> phi;
    for (std::size_t b = 0; b < members_.size(); ++b) {
        const double wb = weights_[static_cast<Eigen::Index>(b)];
        if (wb == 0.0) continue;
        for (std::size_t j = 0; j < members_[b].size(); ++j) {
            comps.push_back(members_[b].component(j));
            phi.push_back(wb * members_[b].weights()[static_cast<Eigen::Index>(j)]);
        }
    }
    Eigen::VectorXd weights = Eigen::Map<Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
    weights /= weights.sum();
    return MixtureModel(std::move(comps), std::move(weights));
}

MixtureModel fit_weighted(const SampleSet& data, const WeightVector& w, const CvOptions& opts, Rng& rng) {
    if (opts.bagging > 0) return bagging_fit(data, w, opts.bagging, opts.em, rng).flatten();
    if (opts.em.components == 1) return MixtureModel(fit_gaussian_closed_form(data, w, opts.em));
    return fit_mixture_em(data, w, opts.em, rng).model;
}

EnsembleModel bagging_fit(const SampleSet& data, double beta, std::size_t replicas, const EmConfig& cfg, Rng& rng) {
    return bagging_fit(data, boltzmann_weights(data, beta), replicas, cfg, rng);
}

EnsembleModel bagging_fit(const SampleSet& data, const WeightVector& w, std::size_t replicas, const EmConfig& cfg,
                          Rng& rng) {
    if (replicas < 1) throw Error(Errc::invalid_input, "bagging needs at least one replica");
    if (data.empty()) throw Error(Errc::empty_sample, "bagging needs data");
    const auto m = data.size();
    std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
    std::vector<MixtureModel> members;
    std::string last_error;
    for (std::size_t b = 0; b < replicas; ++b) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
        for (auto& i : idx) i = pick(rng);
        Rng member_rng(rng());
        try {
            const auto resample = data.subset(idx);
            const auto rw = w.subset(idx);
            if (cfg.components == 1) {
                members.emplace_back(fit_gaussian_closed_form(resample, rw, cfg));
            } else {
                members.push_back(fit_mixture_em(resample, rw, cfg, member_rng).model);
            }
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    if (members.empty()) throw Error(Errc::fit_failure, "every bagging replica failed; last error: " + last_error);
    const auto count = static_cast<Eigen::Index>(members.size());
    return EnsembleModel(std::move(members), Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count)));
}

Eigen::VectorXd softmin_weights(const std::vector<double>& scores, std::optional<double> temperature) {
    if (scores.empty()) throw Error(Errc::invalid_input, "softmin needs scores");
    std::vector<double> finite;
    for (double s : scores) {
        if (std::isfinite(s)) finite.push_back(s);
    }
    if (finite.empty()) throw Error(Errc::stacking_failure, "no member has a finite held-out score");
    const double lowest = *std::min_element(finite.begin(), finite.end());
    double t = 0.0;
    if (temperature) {
        if (!(*temperature >= 0.0)) throw Error(Errc::invalid_input, "temperature must be >= 0");
        t = *temperature;
    } else {
        const double mean = std::accumulate(finite.begin(), finite.end(), 0.0) / static_cast<double>(finite.size());
        double var = 0.0;
        for (double s : finite) var += (s - mean) * (s - mean);
        t = std::sqrt(var / static_cast<double>(finite.size()));
    }
    Eigen::VectorXd w(static_cast<Eigen::Index>(scores.size()));
    for (std::size_t j = 0; j < scores.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (!std::isfinite(scores[j])) {
            w[jj] = 0.0;
        } else if (t > 0.0) {
            w[jj] = std::exp(-(scores[j] - lowest) / t);
        } else {
            // Zero temperature: uniform over the minimizers.
            w[jj] = scores[j] == lowest ? 1.0 : 0.0;
        }
    }
    return w / w.sum();
}

EnsembleModel stack_by_scores(std::vector<MixtureModel> members, const std::vector<double>& scores,
                              std::optional<double> temperature) {
    if (members.size() != scores.size()) throw Error(Errc::invalid_input, "one score per member required");
    return EnsembleModel(std::move(members), softmin_weights(scores, temperature));
}

EnsembleModel stacking_combine(std::vector<MixtureModel> members, const SampleSet& data, const FoldPlan& folds) {
    if (members.size() < 2) throw Error(Errc::invalid_input, "stacking needs at least two members");
    if (data.empty()) throw Error(Errc::empty_sample, "stacking needs data");
    if (folds.assignments().size() != static_cast<std::size_t>(data.size())) {
        throw Error(Errc::invalid_input, "fold plan does not match the data");
    }
    std::vector<double> scores(members.size(), kInf);
    for (std::size_t j = 0; j < members.size(); ++j) {
        double sum = 0.0;
        std::size_t ok = 0;
        for (std::size_t f = 0; f < folds.fold_count(); ++f) {
            const auto idx = folds.held_out(f);
            if (idx.empty()) continue;
            try {
                sum += estimate_expected_G(members[j], data.subset(idx));
                ++ok;
            } catch (const Error&) {
            }
        }
        if (ok > 0) scores[j] = sum / static_cast<double>(ok);
    }
    return stack_by_scores(std::move(members), scores);
}

}  // namespace pcopt
