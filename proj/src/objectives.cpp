#include "pcopt/objectives.hpp"

#include "pcopt/error.hpp"

#include <cmath>
#include <random>

namespace pcopt {

namespace {

void require_dimension(const PointRef& x, Eigen::Index n, std::string_view who) {
    if (x.size() != n) {
        throw Error(Errc::dimension_mismatch, std::string(who) + " expects " + std::to_string(n) +
                                                  " coordinates, got " + std::to_string(x.size()));
    }
}

}  // namespace

double rosenbrock(const PointRef& x) {
    require_dimension(x, 2, "rosenbrock");
    const double a = x[1] - x[0] * x[0];
    const double b = 1.0 - x[0];
    return 100.0 * a * a + b * b;
}

double woods(const PointRef& x, bool classical) {
    require_dimension(x, 4, "woods");
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
    const double t1 = classical ? x2 - x1 * x1 : x2 - x1;
    const double t3 = x4 - x3 * x3;
    return 100.0 * t1 * t1 + (1.0 - x1) * (1.0 - x1) + 90.0 * t3 * t3 + (1.0 - x3) * (1.0 - x3) +
           10.1 * ((1.0 - x2) * (1.0 - x2) + (1.0 - x4) * (1.0 - x4)) +
           19.8 * (1.0 - x2) * (1.0 - x4);
}

void EvaluationLedger::begin_iteration() {
    std::lock_guard lock(mutex_);
    closed_.push_back(current_.exchange(0));
}

std::vector<std::uint64_t> EvaluationLedger::per_iteration() const {
    std::lock_guard lock(mutex_);
    auto out = closed_;
    out.push_back(current_.load());
    return out;
}

std::vector<std::string> objective_names() { return {"rosenbrock", "woods", "noisy-rosenbrock"}; }

ObjectiveSpec make_objective(std::string_view name, std::optional<double> noise_stddev,
                             bool classical_woods) {
    ObjectiveSpec spec;
    spec.name = std::string(name);
    if (name == "rosenbrock" || name == "noisy-rosenbrock") {
        spec.dimension = 2;
        spec.known_optimizer = Point::Ones(2);
        spec.known_optimum_value = 0.0;
        spec.noise_stddev = name == "noisy-rosenbrock" ? 1.0 : 0.0;
    } else if (name == "woods") {
        spec.dimension = 4;
        spec.known_optimizer = Point::Ones(4);
        spec.known_optimum_value = 0.0;
        spec.classical_woods = classical_woods;
    } else {
        throw Error(Errc::config_error, "unknown objective '" + std::string(name) + "'");
    }
    if (noise_stddev) {
        if (!(*noise_stddev >= 0.0) || !std::isfinite(*noise_stddev)) {
            throw Error(Errc::config_error, "noise_stddev must be a finite nonnegative number");
        }
        spec.noise_stddev = *noise_stddev;
    }
    return spec;
}

double evaluate_noiseless(const ObjectiveSpec& spec, const PointRef& x) {
    require_dimension(x, static_cast<Eigen::Index>(spec.dimension), spec.name);
    if (spec.name == "woods") return woods(x, spec.classical_woods);
    if (spec.name == "rosenbrock" || spec.name == "noisy-rosenbrock") return rosenbrock(x);
    throw Error(Errc::config_error, "unknown objective '" + spec.name + "'");
}

double evaluate(const ObjectiveSpec& spec, const PointRef& x, Rng& rng, EvaluationLedger& ledger) {
    double g = evaluate_noiseless(spec, x);
    if (spec.noise_stddev > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.noise_stddev);
        g += noise(rng);
    }
    ledger.record();
    if (!std::isfinite(g)) {
        throw Error(Errc::evaluation_failure, spec.name + " returned a non-finite value");
    }
    return g;
}

}  // namespace pcopt
