#include "pcopt/schedule.hpp"

#include "pcopt/error.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace pcopt {

namespace {

GeometricSchedule fit_log_linear(std::span<const double> t, std::span<const double> beta) {
    const auto n = static_cast<double>(t.size());
    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(beta[i] > 0.0)) throw Error(Errc::invalid_input, "log-mode schedule fit needs positive beta values");
        tbar += t[i];
        ybar += std::log(beta[i]);
    }
    tbar /= n;
    ybar /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tbar) * (t[i] - tbar);
        sty += (t[i] - tbar) * (std::log(beta[i]) - ybar);
    }
    if (!(stt > 0.0)) throw Error(Errc::invalid_input, "schedule fit needs at least two distinct iterations");
    const double slope = sty / stt;
    return {std::exp(ybar - slope * tbar), std::exp(slope)};
}

double sum_sq(std::span<const double> t, std::span<const double> beta, double b0, double k) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = beta[i] - b0 * std::pow(k, t[i]);
        s += r * r;
    }
    return s;
}

/// Levenberg-Marquardt on (beta0, k), started from the log-linear fit.
GeometricSchedule fit_nonlinear(std::span<const double> t, std::span<const double> beta, GeometricSchedule start) {
    double b0 = start.beta0;
    double k = start.k_beta;
    double cost = sum_sq(t, beta, b0, k);
    double lambda = 1e-3;
    for (int it = 0; it < 500 && cost > 0.0; ++it) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double kt = std::pow(k, t[i]);
            const Eigen::Vector2d J(kt, t[i] == 0.0 ? 0.0 : b0 * t[i] * std::pow(k, t[i] - 1.0));
            const double r = beta[i] - b0 * kt;
            jtj += J * J.transpose();
            jtr += J * r;
        }
        bool improved = false;
        while (lambda < 1e12) {
            Eigen::Matrix2d a = jtj;
            a.diagonal() *= 1.0 + lambda;
            const Eigen::Vector2d step = a.ldlt().solve(jtr);
            const double nb0 = b0 + step[0];
            const double nk = k + step[1];
            if (nk > 0.0 && std::isfinite(nb0)) {
                const double next = sum_sq(t, beta, nb0, nk);
                if (next < cost) {
                    const double rel = std::abs(step[0]) / std::max(1e-300, std::abs(b0)) + std::abs(step[1]) / k;
                    b0 = nb0;
                    k = nk;
                    const double drop = cost - next;
                    cost = next;
                    lambda = std::max(lambda * 0.1, 1e-12);
                    improved = true;
                    if (rel < 1e-15 || drop <= 1e-30 * cost) return {b0, k};
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return {b0, k};
}

}  // namespace

ScheduleFit fit_geometric_schedule(std::span<const double> iterations, std::span<const double> betas) {
    if (iterations.size() != betas.size()) throw Error(Errc::invalid_input, "iterations and betas differ in length");
    if (iterations.size() < 2) throw Error(Errc::invalid_input, "schedule fit needs at least two points");
    ScheduleFit fit;
    fit.log_linear = fit_log_linear(iterations, betas);
    fit.nonlinear = fit_nonlinear(iterations, betas, fit.log_linear);
    return fit;
}

ScheduleFit fit_geometric_schedule(const std::vector<RunTrace>& traces) {
    if (traces.empty()) throw Error(Errc::invalid_input, "schedule fit needs traces");
    std::vector<double> t, beta;
    for (const auto& trace : traces) {
        if (trace.records.size() < 2) throw Error(Errc::invalid_input, "every trace needs at least two beta values");
        for (const auto& r : trace.records) {
            t.push_back(static_cast<double>(r.iteration));
            beta.push_back(r.beta);
        }
    }
    return fit_geometric_schedule(t, beta);
}

}  // namespace pcopt
