#include "pcopt/models.hpp"

#include "pcopt/error.hpp"
#include "pcopt/text.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace pcopt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() == 0) return kNegInf;
    const double top = v.maxCoeff();
    if (top == kNegInf) return kNegInf;
    if (!std::isfinite(top)) return top;
    return top + std::log((v.array() - top).exp().sum());
}

Eigen::VectorXd exp_shifted(const Eigen::Ref<const Eigen::VectorXd>& v, double shift) {
    return v.unaryExpr([shift](double x) { return std::exp(x - shift); });
}

Gaussian::Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
    const auto n = mean_.size();
    if (n < 1) throw Error(Errc::invalid_input, "gaussian needs dimension >= 1");
    if (covariance_.rows() != n || covariance_.cols() != n) {
        throw Error(Errc::dimension_mismatch, "covariance shape does not match mean");
    }
    if (!mean_.allFinite() || !covariance_.allFinite()) {
        throw Error(Errc::model_degeneracy, "gaussian parameters are not finite");
    }
    const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
    if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error(Errc::model_degeneracy, "covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    if (llt.info() != Eigen::Success) {
        throw Error(Errc::model_degeneracy, "covariance is not positive definite");
    }
    lower_ = llt.matrixL();
    if ((lower_.diagonal().array() <= 0.0).any()) {
        throw Error(Errc::model_degeneracy, "covariance factor has a zero pivot");
    }
    const double log_det = 2.0 * lower_.diagonal().array().log().sum();
    log_normalizer_ = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det);
}

double Gaussian::log_density(const PointRef& x) const {
    if (x.size() != dimension()) throw Error(Errc::dimension_mismatch, "point does not match gaussian");
    const Eigen::VectorXd z = lower_.triangularView<Eigen::Lower>().solve(x - mean_);
    return log_normalizer_ - 0.5 * z.squaredNorm();
}

double Gaussian::density(const PointRef& x) const { return std::exp(log_density(x)); }

Point Gaussian::sample(Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(dimension());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return mean_ + lower_ * z;
}

MixtureModel::MixtureModel(std::vector<Gaussian> components, Eigen::VectorXd weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
    if (components_.empty()) throw Error(Errc::invalid_input, "mixture needs at least one component");
    if (static_cast<std::size_t>(weights_.size()) != components_.size()) {
        throw Error(Errc::invalid_input, "mixture weight count differs from component count");
    }
    const auto n = components_.front().dimension();
    for (const auto& c : components_) {
        if (c.dimension() != n) throw Error(Errc::dimension_mismatch, "mixture components differ in dimension");
    }
    if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
        throw Error(Errc::invalid_input, "mixture weights must be finite and nonnegative");
    }
    if (std::abs(weights_.sum() - 1.0) > 1e-12) {
        throw Error(Errc::invalid_input, "mixture weights do not sum to 1");
    }
}

MixtureModel::MixtureModel(Gaussian single)
    : MixtureModel(std::vector<Gaussian>{std::move(single)}, Eigen::VectorXd::Ones(1)) {}

Eigen::VectorXd MixtureModel::component_log_joint(const PointRef& x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(components_.size()));
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out[jj] = weights_[jj] > 0.0 ? std::log(weights_[jj]) + components_[j].log_density(x) : kNegInf;
    }
    return out;
}

double MixtureModel::log_density(const PointRef& x) const {
    if (components_.size() == 1) return components_.front().log_density(x);
    return log_sum_exp(component_log_joint(x));
}

double MixtureModel::density(const PointRef& x) const {
    double total = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto w = weights_[static_cast<Eigen::Index>(j)];
        if (w > 0.0) total += w * components_[j].density(x);
    }
    return total;
}

Point MixtureModel::sample(Rng& rng) const {
    std::size_t j = 0;
    if (components_.size() > 1) {
        std::discrete_distribution<std::size_t> pick(weights_.data(), weights_.data() + weights_.size());
        j = pick(rng);
    }
    return components_[j].sample(rng);
}

std::string MixtureModel::serialize() const {
    std::ostringstream out;
    out << "pcopt-mixture 1\n";
    out << "dimension " << dimension() << '\n';
    out << "components " << components_.size() << '\n';
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto& c = components_[j];
        out << "weight " << text::format_double(weights_[static_cast<Eigen::Index>(j)]) << '\n';
        out << "mean";
        for (Eigen::Index i = 0; i < c.dimension(); ++i) out << ' ' << text::format_double(c.mean()[i]);
        out << "\ncovariance";
        for (Eigen::Index r = 0; r < c.dimension(); ++r) {
            for (Eigen::Index k = 0; k < c.dimension(); ++k) out << ' ' << text::format_double(c.covariance()(r, k));
        }
        out << '\n';
    }
    return out.str();
}

MixtureModel MixtureModel::parse(std::string_view source) {
    std::istringstream in{std::string(source)};
    std::string line;
    auto next = [&](std::string_view key) {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto fields = text::split(line);
            if (fields.empty() || fields.front() != key) {
                throw Error(Errc::invalid_input, "expected '" + std::string(key) + "' in mixture text");
            }
            return std::vector<std::string>(fields.begin() + 1, fields.end());
        }
        throw Error(Errc::invalid_input, "mixture text ends before '" + std::string(key) + "'");
    };
    const auto version = next("pcopt-mixture");
    if (version.size() != 1 || version.front() != "1") {
        throw Error(Errc::invalid_input, "unsupported mixture format version");
    }
    const auto n = static_cast<Eigen::Index>(text::parse_int(next("dimension").at(0)));
    const auto count = text::parse_int(next("components").at(0));
    if (n < 1 || count < 1) throw Error(Errc::invalid_input, "mixture text has empty shape");
    std::vector<Gaussian> comps;
    Eigen::VectorXd weights(count);
    for (long long j = 0; j < count; ++j) {
        weights[j] = text::parse_double(next("weight").at(0));
        const auto mean_tokens = next("mean");
        const auto cov_tokens = next("covariance");
        if (static_cast<Eigen::Index>(mean_tokens.size()) != n ||
            static_cast<Eigen::Index>(cov_tokens.size()) != n * n) {
            throw Error(Errc::invalid_input, "mixture component has wrong coordinate count");
        }
        Eigen::VectorXd mean(n);
        Eigen::MatrixXd cov(n, n);
        for (Eigen::Index i = 0; i < n; ++i) mean[i] = text::parse_double(mean_tokens[static_cast<std::size_t>(i)]);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index k = 0; k < n; ++k) cov(r, k) = text::parse_double(cov_tokens[static_cast<std::size_t>(r * n + k)]);
        }
        comps.emplace_back(std::move(mean), std::move(cov));
    }
    return MixtureModel(std::move(comps), std::move(weights));
}

void Box::validate() const {
    if (lower.size() < 1 || lower.size() != upper.size()) {
        throw Error(Errc::invalid_domain, "box bounds are empty or differ in dimension");
    }
    if (!lower.allFinite() || !upper.allFinite()) throw Error(Errc::invalid_domain, "box bounds are not finite");
    if (((upper - lower).array() <= 0.0).any()) {
        throw Error(Errc::invalid_domain, "box has zero or negative width in some coordinate");
    }
}

double Box::volume() const {
    validate();
    return (upper - lower).prod();
}

Box Box::cube(Eigen::Index n, double lo, double hi) {
    return Box{Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
}

ProposalDraw draw_samples(const MixtureModel& model, Eigen::Index m, Rng& rng) {
    if (m < 1) throw Error(Errc::invalid_input, "draw_samples needs m >= 1");
    ProposalDraw out{Eigen::MatrixXd(model.dimension(), m), Eigen::VectorXd(m)};
    for (Eigen::Index i = 0; i < m; ++i) out.points.col(i) = model.sample(rng);
    for (Eigen::Index i = 0; i < m; ++i) {
        out.proposal_densities[i] = model.density(out.points.col(i));
        if (!(out.proposal_densities[i] > 0.0) || !std::isfinite(out.proposal_densities[i])) {
            throw Error(Errc::model_degeneracy, "sampled point has zero or non-finite density");
        }
    }
    return out;
}

ProposalDraw uniform_initial_proposal(const Box& bounds, Eigen::Index m, Rng& rng) {
    if (m < 1) throw Error(Errc::invalid_input, "uniform_initial_proposal needs m >= 1");
    const double volume = bounds.volume();
    ProposalDraw out{Eigen::MatrixXd(bounds.dimension(), m), Eigen::VectorXd::Constant(m, 1.0 / volume)};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index d = 0; d < bounds.dimension(); ++d) {
            out.points(d, i) = bounds.lower[d] + (bounds.upper[d] - bounds.lower[d]) * unit(rng);
        }
    }
    return out;
}

}  // namespace pcopt
