#include "pcopt/fitting.hpp"

#include "pcopt/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace pcopt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Rows with nonzero normalized weight, packed densely.
struct ActiveData {
    Eigen::MatrixXd points;  // n x k
    Eigen::VectorXd weights; // sums to one
};

ActiveData active_rows(const SampleSet& data, const WeightVector& w) {
    if (w.size() != data.size()) throw Error(Errc::invalid_input, "weights and data differ in length");
    if (data.empty()) throw Error(Errc::empty_sample, "cannot fit an empty sample set");
    const double top = w.max_log();
    if (!std::isfinite(top)) throw Error(Errc::degenerate_weights, "total Boltzmann weight is zero");
    const Eigen::VectorXd s = exp_shifted(w.log_weights, top);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) k += s[i] > 0.0 ? 1 : 0;
    ActiveData out{Eigen::MatrixXd(data.dimension(), k), Eigen::VectorXd(k)};
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > 0.0) {
            out.points.col(j) = data.point(i);
            out.weights[j] = s[i];
            ++j;
        }
    }
    out.weights /= out.weights.sum();
    return out;
}

Eigen::VectorXd weighted_mean(const Eigen::MatrixXd& x, const Eigen::VectorXd& s) {
    return x * s / s.sum();
}

Eigen::MatrixXd weighted_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& s, const Eigen::VectorXd& mu) {
    const Eigen::MatrixXd centered = x.colwise() - mu;
    Eigen::MatrixXd cov = centered * s.asDiagonal() * centered.transpose() / s.sum();
    return 0.5 * (cov + cov.transpose());
}

double effective_floor(const EmConfig& cfg, const Eigen::MatrixXd& global_cov) {
    const double relative = cfg.relative_covariance_floor * global_cov.trace() / static_cast<double>(global_cov.rows());
    return std::max(cfg.covariance_floor, std::isfinite(relative) ? relative : 0.0);
}

/// Adds floor * I when the smallest eigenvalue is below the floor. A
/// slightly negative eigenvalue from rounding is lifted to the floor.
bool apply_floor(Eigen::MatrixXd& cov, double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw Error(Errc::model_degeneracy, "covariance eigen-decomposition failed");
    const double smallest = eig.eigenvalues().minCoeff();
    if (smallest < floor) {
        cov.diagonal().array() += floor + std::max(0.0, -smallest);
        return true;
    }
    return false;
}

/// Raises every eigenvalue below the floor to the floor. This is the
/// maximizer of the Gaussian likelihood under Sigma >= floor * I, so an M-step
/// using it cannot increase the weighted NLL.
bool clip_floor(Eigen::MatrixXd& cov, double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw Error(Errc::model_degeneracy, "covariance eigen-decomposition failed");
    if (eig.eigenvalues().minCoeff() >= floor) return false;
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
    cov = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    return true;
}

/// Per-point log(phi_j N_j(x_i)), k x M.
Eigen::MatrixXd log_joint(const Eigen::MatrixXd& x, const std::vector<Gaussian>& comps, const Eigen::VectorXd& phi) {
    const auto n = static_cast<double>(x.rows());
    Eigen::MatrixXd out(x.cols(), static_cast<Eigen::Index>(comps.size()));
    for (std::size_t j = 0; j < comps.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (!(phi[jj] > 0.0)) {
            out.col(jj).setConstant(kNegInf);
            continue;
        }
        const auto& L = comps[j].cholesky_factor();
        const Eigen::MatrixXd z = L.triangularView<Eigen::Lower>().solve(x.colwise() - comps[j].mean());
        const double log_norm = -0.5 * (n * std::log(2.0 * std::numbers::pi)) - L.diagonal().array().log().sum();
        out.col(jj) = (log_norm + std::log(phi[jj])) - 0.5 * z.colwise().squaredNorm().transpose().array();
    }
    return out;
}

struct EmRun {
    std::vector<Gaussian> comps;
    Eigen::VectorXd phi;
    double nll = 0.0;
    std::size_t iterations = 0;
    std::size_t repairs = 0;
    std::vector<double> trace;
};

/// E-step: fills responsibilities (k x M) and returns the normalized NLL.
double e_step(const ActiveData& d, const EmRun& run, Eigen::MatrixXd& resp) {
    resp = log_joint(d.points, run.comps, run.phi);
    double nll = 0.0;
    for (Eigen::Index i = 0; i < resp.rows(); ++i) {
        const double top = resp.row(i).maxCoeff();
        if (!std::isfinite(top)) throw Error(Errc::infinite_objective, "mixture density vanishes at a weighted point");
        const double lse = top + std::log((resp.row(i).array() - top).exp().sum());
        resp.row(i) = exp_shifted(resp.row(i).transpose(), lse).transpose();
        nll -= d.weights[i] * lse;
    }
    return nll;
}

EmRun run_em(const ActiveData& d, const EmConfig& cfg, const Eigen::MatrixXd& init_cov, double floor, Rng& rng) {
    const auto k = d.points.cols();
    const auto m = static_cast<Eigen::Index>(cfg.components);
    Eigen::Index heaviest = 0;
    d.weights.maxCoeff(&heaviest);

    // Initial means: distinct rows drawn with probability proportional to s.
    std::vector<double> pool(d.weights.data(), d.weights.data() + k);
    std::vector<Eigen::Index> seeds;
    for (Eigen::Index j = 0; j < m; ++j) {
        std::discrete_distribution<Eigen::Index> pick(pool.begin(), pool.end());
        const auto i = pick(rng);
        seeds.push_back(i);
        if (static_cast<Eigen::Index>(seeds.size()) < k) pool[static_cast<std::size_t>(i)] = 0.0;
        if (std::all_of(pool.begin(), pool.end(), [](double v) { return v == 0.0; })) {
            pool.assign(d.weights.data(), d.weights.data() + k);
        }
    }

    EmRun run;
    for (auto i : seeds) run.comps.emplace_back(d.points.col(i), init_cov);
    run.phi = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));

    Eigen::MatrixXd resp;
    run.nll = e_step(d, run, resp);
    run.trace.push_back(run.nll);
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        std::vector<Gaussian> next;
        next.reserve(run.comps.size());
        Eigen::VectorXd phi(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::VectorXd ws = resp.col(j).cwiseProduct(d.weights);
            const double mass = ws.sum();
            if (!(mass > 1e-12)) {
                // Empty component: reseed at the heaviest datum.
                next.emplace_back(d.points.col(heaviest), init_cov);
                phi[j] = 1.0 / static_cast<double>(m);
                ++run.repairs;
                continue;
            }
            const Eigen::VectorXd mu = weighted_mean(d.points, ws);
            Eigen::MatrixXd cov = weighted_covariance(d.points, ws, mu);
            if (clip_floor(cov, floor)) ++run.repairs;
            next.emplace_back(mu, std::move(cov));
            phi[j] = mass / d.weights.sum();
        }
        run.comps = std::move(next);
        run.phi = phi / phi.sum();
        ++run.iterations;
        const double prev = run.nll;
        run.nll = e_step(d, run, resp);
        run.trace.push_back(run.nll);
        if (prev - run.nll < cfg.nll_tolerance) break;
    }
    return run;
}

}  // namespace

void EmConfig::validate() const {
    if (components < 1) throw Error(Errc::invalid_input, "EM needs at least one component");
    if (max_iterations < 1) throw Error(Errc::invalid_input, "EM needs max_iterations >= 1");
    if (restarts < 1) throw Error(Errc::invalid_input, "EM needs restarts >= 1");
    if (!(nll_tolerance > 0.0)) throw Error(Errc::invalid_input, "nll_tolerance must be positive");
    if (!(covariance_floor > 0.0)) throw Error(Errc::invalid_input, "covariance_floor must be positive");
    if (!(relative_covariance_floor >= 0.0)) throw Error(Errc::invalid_input, "relative_covariance_floor must be >= 0");
}

double weighted_nll(const MixtureModel& model, const SampleSet& data, const WeightVector& w) {
    if (w.size() != data.size()) throw Error(Errc::invalid_input, "weights and data differ in length");
    if (data.empty()) return 0.0;
    const double top = w.max_log();
    if (top == kNegInf) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double s = std::exp(w.log_weights[i] - top);
        if (s == 0.0) continue;
        const double lq = model.log_density(data.point(i));
        if (lq == kNegInf) throw Error(Errc::infinite_objective, "model density is zero at a weighted point");
        acc -= s * lq;
    }
    return std::exp(top) * acc;
}

double normalized_weighted_nll(const MixtureModel& model, const SampleSet& data, const WeightVector& w) {
    WeightVector shifted{w.log_weights.array() - w.log_total(), w.beta};
    return weighted_nll(model, data, shifted);
}

Gaussian fit_gaussian_closed_form(const SampleSet& data, const WeightVector& w, const EmConfig& cfg) {
    cfg.validate();
    const auto d = active_rows(data, w);
    const Eigen::VectorXd mu = weighted_mean(d.points, d.weights);
    Eigen::MatrixXd cov = weighted_covariance(d.points, d.weights, mu);
    apply_floor(cov, effective_floor(cfg, cov));
    return Gaussian(mu, std::move(cov));
}

FitReport fit_mixture_em(const SampleSet& data, const WeightVector& w, const EmConfig& cfg, Rng& rng) {
    cfg.validate();
    const auto d = active_rows(data, w);
    const Eigen::VectorXd mu = weighted_mean(d.points, d.weights);
    Eigen::MatrixXd global_cov = weighted_covariance(d.points, d.weights, mu);
    const double floor = effective_floor(cfg, global_cov);
    apply_floor(global_cov, floor);

    const std::uint64_t base = rng();
    std::vector<std::vector<double>> traces;
    std::optional<EmRun> best;
    std::size_t best_index = 0;
    std::size_t repairs = 0;
    std::string last_error;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Rng restart_rng(derive_seed(base, r));
        try {
            auto run = run_em(d, cfg, global_cov, floor, restart_rng);
            traces.push_back(run.trace);
            repairs += run.repairs;
            if (std::isfinite(run.nll) && (!best || run.nll < best->nll)) {
                best = std::move(run);
                best_index = r;
            }
        } catch (const Error& e) {
            traces.emplace_back();
            last_error = e.what();
        }
    }
    if (!best) throw Error(Errc::fit_failure, "every EM restart failed; last error: " + last_error);
    return FitReport{MixtureModel(std::move(best->comps), std::move(best->phi)), best->nll, best->iterations,
                     best_index, repairs, std::move(traces)};
}

Eigen::VectorXd em_responsibilities(const MixtureModel& model, const PointRef& x) {
    Eigen::VectorXd lj = model.component_log_joint(x);
    const double lse = log_sum_exp(lj);
    if (!std::isfinite(lse)) throw Error(Errc::degenerate_point, "every component density vanishes at the point");
    return exp_shifted(lj, lse);
}

}  // namespace pcopt
