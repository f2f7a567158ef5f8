#include "pcopt/error.hpp"
#include "pcopt/fitting.hpp"

#include "nelder_mead.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <algorithm>

using namespace pcopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

SampleSet unit_h(const Eigen::MatrixXd& x) {
    return SampleSet(x, Eigen::VectorXd::Zero(x.cols()), Eigen::VectorXd::Ones(x.cols()));
}

WeightVector from_linear(const Eigen::VectorXd& s) {
    return WeightVector{s.array().log().matrix(), 1.0};
}

struct Random2d {
    SampleSet data;
    WeightVector w;
};

Random2d random_problem(Rng& rng, Eigen::Index m) {
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Eigen::MatrixXd x(2, m);
    Eigen::VectorXd s(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        x(0, i) = 1.0 + 2.0 * z(rng);
        x(1, i) = -0.5 + 0.7 * x(0, i) + z(rng);
        s[i] = u(rng);
    }
    return {unit_h(x), from_linear(s)};
}

/// Normalized weighted NLL of N(mu, L L^T), written out directly.
double oracle_nll(const Eigen::MatrixXd& x, const Eigen::VectorXd& s, const Eigen::Vector2d& mu, const Eigen::Matrix2d& L) {
    const double total = s.sum();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        const Eigen::Vector2d d = x.col(i) - mu;
        // Forward substitution with the lower-triangular factor.
        const double z0 = d[0] / L(0, 0);
        const double z1 = (d[1] - L(1, 0) * z0) / L(1, 1);
        const double logq = -std::log(2.0 * std::numbers::pi) - std::log(L(0, 0) * L(1, 1)) - 0.5 * (z0 * z0 + z1 * z1);
        acc -= s[i] / total * logq;
    }
    return acc;
}

Eigen::Matrix2d factor_from(const Eigen::VectorXd& p) {
    Eigen::Matrix2d L;
    L << std::exp(p[2]), 0.0, p[3], std::exp(p[4]);
    return L;
}

}  // namespace

TEST_CASE("EmConfig validation") {
    EmConfig c;
    CHECK_NOTHROW(c.validate());
    c.components = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.covariance_floor = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.nll_tolerance = -1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.restarts = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("weighted_nll") {
    const MixtureModel std1(Gaussian(vec({0.0}), Eigen::MatrixXd::Identity(1, 1)));
    const auto one = unit_h(Eigen::MatrixXd::Zero(1, 1));
    CHECK(weighted_nll(std1, one, from_linear(vec({1.0}))) ==
          doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(std::abs(weighted_nll(std1, one, from_linear(vec({1.0}))) - 0.91894) < 1e-5);

    const auto three = unit_h((Eigen::MatrixXd(1, 3) << -1.0, 0.5, 2.0).finished());
    CHECK(weighted_nll(std1, three, WeightVector{Eigen::VectorXd::Constant(3, -kInf), 1.0}) == 0.0);

    const Eigen::VectorXd s = vec({0.2, 1.5, 0.01});
    const double base = weighted_nll(std1, three, from_linear(s));
    CHECK(weighted_nll(std1, three, from_linear(2.0 * s)) == doctest::Approx(2.0 * base).epsilon(1e-14));
    CHECK(normalized_weighted_nll(std1, three, from_linear(2.0 * s)) ==
          doctest::Approx(base / s.sum()).epsilon(1e-14));

    CHECK_THROWS_AS(weighted_nll(std1, three, from_linear(vec({1.0}))), Error);

    const auto far = unit_h((Eigen::MatrixXd(1, 2) << 0.0, kInf).finished());
    try {
        static_cast<void>(weighted_nll(std1, far, from_linear(vec({1.0, 1.0}))));
        FAIL("expected infinite objective");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::infinite_objective);
    }
    CHECK(std::isfinite(weighted_nll(std1, far, WeightVector{vec({0.0, -kInf}), 1.0})));
}

TEST_CASE("closed form: printed examples") {
    const auto square = unit_h((Eigen::MatrixXd(2, 4) << 0, 2, 0, 2, 0, 0, 2, 2).finished());
    const auto g = fit_gaussian_closed_form(square, from_linear(Eigen::VectorXd::Ones(4)));
    CHECK((g.mean() - vec({1.0, 1.0})).norm() <= 1e-14);
    CHECK((g.covariance() - Eigen::Matrix2d::Identity()).norm() <= 1e-14);

    EmConfig cfg;
    cfg.covariance_floor = 1e-6;
    const WeightVector spike{vec({-kInf, 0.0, -kInf, -kInf}), 1.0};
    const auto point = fit_gaussian_closed_form(square, spike, cfg);
    CHECK(point.mean() == vec({2.0, 0.0}));
    CHECK((point.covariance() - 1e-6 * Eigen::Matrix2d::Identity()).norm() <= 1e-20);

    try {
        static_cast<void>(fit_gaussian_closed_form(square, WeightVector{Eigen::VectorXd::Constant(4, -kInf), 1.0}));
        FAIL("expected degenerate weights");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_weights);
    }
}

TEST_CASE("closed form matches a numerical minimizer of the weighted NLL") {
    Rng rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        const auto [data, w] = random_problem(rng, 20);
        const Eigen::VectorXd s = w.log_weights.array().exp();
        const auto& x = data.points();
        const auto f = [&](const Eigen::VectorXd& p) { return oracle_nll(x, s, p.head<2>(), factor_from(p)); };
        // Generic start: unweighted centroid and unit covariance.
        Eigen::VectorXd start = Eigen::VectorXd::Zero(5);
        start.head<2>() = x.rowwise().mean();
        const auto nm = testing::nelder_mead(f, start, 0.5, 1e-18, 40000, 12);
        const Eigen::Matrix2d L = factor_from(nm.x);
        const Eigen::Matrix2d sigma = L * L.transpose();

        const auto g = fit_gaussian_closed_form(data, w);
        CAPTURE(trial);
        CHECK((g.mean() - nm.x.head<2>()).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((g.covariance() - sigma).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(normalized_weighted_nll(MixtureModel(g), data, w) <= nm.value + 1e-12);
    }
}

TEST_CASE("closed form is a local minimum under random perturbations") {
    Rng rng(8);
    const auto [data, w] = random_problem(rng, 30);
    const auto g = fit_gaussian_closed_form(data, w);
    const double best = normalized_weighted_nll(MixtureModel(g), data, w);
    std::normal_distribution<double> z;
    for (int k = 0; k < 100; ++k) {
        Eigen::Vector2d dmu(z(rng), z(rng));
        Eigen::Matrix2d a;
        a << z(rng), z(rng), z(rng), z(rng);
        const Eigen::Matrix2d dsig = 0.5 * (a + a.transpose());
        const double eps = 1e-3;
        const Gaussian moved(g.mean() + eps * dmu, g.covariance() + eps * dsig);
        REQUIRE(normalized_weighted_nll(MixtureModel(moved), data, w) >= best);
    }
}

TEST_CASE("closed form: permutation invariance and scale equivariance") {
    Rng rng(19);
    const auto [data, w] = random_problem(rng, 25);
    const auto g = fit_gaussian_closed_form(data, w);

    std::vector<Eigen::Index> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto gp = fit_gaussian_closed_form(data.subset(perm), w.subset(perm));
    CHECK((gp.mean() - g.mean()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((gp.covariance() - g.covariance()).cwiseAbs().maxCoeff() <= 1e-12);

    for (double c : {0.1, 3.0, -2.0}) {
        const auto gs = fit_gaussian_closed_form(unit_h(c * data.points()), w);
        CHECK((gs.mean() - c * g.mean()).cwiseAbs().maxCoeff() <= 1e-12 * std::abs(c) * 10.0);
        CHECK((gs.covariance() - c * c * g.covariance()).cwiseAbs().maxCoeff() <= 1e-12 * c * c * 10.0);
    }
}

TEST_CASE("EM with one component equals the closed form") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto [data, w] = random_problem(rng, 40);
        EmConfig cfg;
        cfg.components = 1;
        const auto report = fit_mixture_em(data, w, cfg, rng);
        const auto g = fit_gaussian_closed_form(data, w, cfg);
        REQUIRE(report.model.size() == 1);
        const auto& c = report.model.component(0);
        CHECK((c.mean() - g.mean()).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((c.covariance() - g.covariance()).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::isfinite(report.final_weighted_nll));
    }
}

TEST_CASE("EM separates two clusters") {
    Rng rng(41);
    std::normal_distribution<double> z;
    const Eigen::Index per = 50;
    Eigen::MatrixXd x(1, 2 * per);
    for (Eigen::Index i = 0; i < per; ++i) {
        x(0, i) = -10.0 + z(rng);
        x(0, per + i) = 10.0 + z(rng);
    }
    const auto data = unit_h(x);
    const WeightVector w{Eigen::VectorXd::Zero(2 * per), 1.0};
    // Per-cluster closed-form oracle: unit weights make it the plain mean.
    const double left = x.leftCols(per).mean(), right = x.rightCols(per).mean();

    EmConfig cfg;
    cfg.components = 2;
    const auto report = fit_mixture_em(data, w, cfg, rng);
    std::vector<double> means{report.model.component(0).mean()[0], report.model.component(1).mean()[0]};
    std::sort(means.begin(), means.end());
    CHECK(std::abs(means[0] - left) <= 0.1);
    CHECK(std::abs(means[1] - right) <= 0.1);
    CHECK(std::abs(report.model.weights().sum() - 1.0) <= 1e-12);
    CHECK(report.nll_traces.size() == cfg.restarts);
}

TEST_CASE("EM never increases the weighted NLL and phi stays on the simplex") {
    Rng rng(99);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(-6.0, 0.0);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = 1 + trial % 3, m = 30 + trial;
        Eigen::MatrixXd x(n, m);
        Eigen::VectorXd logs(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double shift = (i % 3) * 4.0 - 4.0;
            for (Eigen::Index d = 0; d < n; ++d) x(d, i) = shift + z(rng);
            logs[i] = u(rng);
        }
        EmConfig cfg;
        cfg.components = 2 + static_cast<std::size_t>(trial % 3);
        cfg.max_iterations = 60;
        cfg.nll_tolerance = 1e-12;
        const auto report = fit_mixture_em(unit_h(x), WeightVector{logs, 1.0}, cfg, rng);
        CAPTURE(trial);
        for (const auto& trace : report.nll_traces) {
            for (std::size_t k = 1; k < trace.size(); ++k) REQUIRE(trace[k] <= trace[k - 1] + 1e-10);
        }
        CHECK(std::abs(report.model.weights().sum() - 1.0) <= 1e-12);
        CHECK(std::isfinite(report.final_weighted_nll));
        CHECK(report.final_weighted_nll == doctest::Approx(report.nll_traces[report.restart_index].back()));
    }
}

TEST_CASE("EM is reproducible from the seed and repairs degenerate clusters") {
    Rng a(5), b(5);
    Rng gen(6);
    const auto [data, w] = random_problem(gen, 30);
    EmConfig cfg;
    cfg.components = 3;
    const auto ra = fit_mixture_em(data, w, cfg, a);
    const auto rb = fit_mixture_em(data, w, cfg, b);
    CHECK(ra.model.serialize() == rb.model.serialize());

    // Three distinct points under M = 3 collapse every component to a point.
    const auto tiny = unit_h((Eigen::MatrixXd(2, 3) << 0, 1, 0, 0, 0, 1).finished());
    const auto rt = fit_mixture_em(tiny, WeightVector{Eigen::VectorXd::Zero(3), 1.0}, cfg, a);
    CHECK(rt.degeneracies_repaired > 0);
    CHECK(std::isfinite(rt.final_weighted_nll));
}

TEST_CASE("EM fails cleanly when every restart hits an infinite objective") {
    const auto bad = unit_h((Eigen::MatrixXd(1, 3) << 0.0, 1.0, kInf).finished());
    EmConfig cfg;
    cfg.components = 2;
    Rng rng(1);
    try {
        static_cast<void>(fit_mixture_em(bad, WeightVector{Eigen::VectorXd::Zero(3), 1.0}, cfg, rng));
        FAIL("expected fit failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::fit_failure);
    }
}

TEST_CASE("em_responsibilities") {
    const auto g0 = Gaussian(vec({-1.0}), Eigen::MatrixXd::Identity(1, 1));
    const auto g1 = Gaussian(vec({1.0}), Eigen::MatrixXd::Identity(1, 1));
    CHECK(em_responsibilities(MixtureModel(g0), vec({3.0})) == vec({1.0}));
    const auto mid = em_responsibilities(MixtureModel({g0, g1}, vec({0.5, 0.5})), vec({0.0}));
    CHECK(std::abs(mid[0] - 0.5) <= 1e-15);
    CHECK(std::abs(mid[1] - 0.5) <= 1e-15);
    const auto prior = em_responsibilities(MixtureModel({g0, g0}, vec({0.99, 0.01})), vec({0.7}));
    CHECK(std::abs(prior[0] - 0.99) <= 1e-12);
    CHECK(std::abs(prior[1] - 0.01) <= 1e-12);

    Rng rng(4);
    std::normal_distribution<double> z;
    const MixtureModel q({g0, g1, Gaussian(vec({4.0}), Eigen::MatrixXd::Constant(1, 1, 0.1))}, vec({0.2, 0.5, 0.3}));
    for (int k = 0; k < 1000; ++k) {
        const auto r = em_responsibilities(q, vec({5.0 * z(rng)}));
        REQUIRE((r.array() >= 0.0).all());
        REQUIRE(std::abs(r.sum() - 1.0) <= 1e-12);
    }
    try {
        static_cast<void>(em_responsibilities(q, vec({kInf})));
        FAIL("expected degenerate point");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_point);
    }
}
