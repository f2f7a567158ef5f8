#pragma once

#include "pcopt/rng.hpp"

#include <Eigen/Core>

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcopt {

using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// G(x) = 100 (x2 - x1^2)^2 + (1 - x1)^2.
double rosenbrock(const PointRef& x);

/// Woods function. The default first term is 100 (x2 - x1)^2; `classical`
/// selects the textbook 100 (x2 - x1^2)^2 instead.
double woods(const PointRef& x, bool classical = false);

struct ObjectiveSpec {
    std::string name;
    std::size_t dimension = 0;
    std::optional<double> known_optimum_value;
    std::optional<Point> known_optimizer;
    double noise_stddev = 0.0;
    bool classical_woods = false;
};

/// Counts objective evaluations, overall and per optimizer iteration.
/// Safe for concurrent record() calls.
class EvaluationLedger {
public:
    EvaluationLedger() = default;
    EvaluationLedger(const EvaluationLedger&) = delete;
    EvaluationLedger& operator=(const EvaluationLedger&) = delete;

    void record(std::uint64_t n = 1) noexcept {
        total_.fetch_add(n, std::memory_order_relaxed);
        current_.fetch_add(n, std::memory_order_relaxed);
    }

    /// Closes the running per-iteration counter and opens a new one.
    void begin_iteration();

    [[nodiscard]] std::uint64_t total() const noexcept { return total_.load(); }

    /// Closed counters followed by the open one.
    [[nodiscard]] std::vector<std::uint64_t> per_iteration() const;

private:
    std::atomic<std::uint64_t> total_{0};
    std::atomic<std::uint64_t> current_{0};
    mutable std::mutex mutex_;
    std::vector<std::uint64_t> closed_;
};

/// Names accepted by make_objective.
std::vector<std::string> objective_names();

/// Looks up a registered objective. `noise_stddev` overrides the registry
/// default (noisy-rosenbrock defaults to 1.0, everything else to 0).
ObjectiveSpec make_objective(std::string_view name,
                             std::optional<double> noise_stddev = std::nullopt,
                             bool classical_woods = false);

/// Deterministic part of the objective.
double evaluate_noiseless(const ObjectiveSpec& spec, const PointRef& x);

/// Base objective plus N(0, noise_stddev^2) when noise_stddev > 0. The rng is
/// only consumed for noisy objectives. Every call is recorded in `ledger`.
double evaluate(const ObjectiveSpec& spec, const PointRef& x, Rng& rng, EvaluationLedger& ledger);

}  // namespace pcopt
