#pragma once

// Derivative-free minimizer used as an independent oracle in tests.

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace pcopt::testing {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
};

/// Standard reflection/expansion/contraction/shrink with restarts from the
/// incumbent; stops when the simplex spread in f falls below f_tol.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd start,
                                    double step, double f_tol, int max_evals, int restarts) {
    const auto n = start.size();
    NelderMeadResult best{start, f(start)};
    for (int r = 0; r < restarts; ++r) {
        std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), best.x);
        std::vector<double> vals(static_cast<std::size_t>(n + 1));
        for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)][i] += step;
        for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
        int evals = 0;
        std::vector<std::size_t> order(pts.size());
        while (evals < max_evals) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
            const auto lo = order.front(), hi = order.back(), second = order[order.size() - 2];
            if (vals[hi] - vals[lo] < f_tol) break;
            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (i != hi) centroid += pts[i];
            centroid /= static_cast<double>(n);
            const Eigen::VectorXd refl = centroid + (centroid - pts[hi]);
            const double fr = f(refl);
            ++evals;
            if (fr < vals[lo]) {
                const Eigen::VectorXd exp = centroid + 2.0 * (centroid - pts[hi]);
                const double fe = f(exp);
                ++evals;
                if (fe < fr) {
                    pts[hi] = exp;
                    vals[hi] = fe;
                } else {
                    pts[hi] = refl;
                    vals[hi] = fr;
                }
            } else if (fr < vals[second]) {
                pts[hi] = refl;
                vals[hi] = fr;
            } else {
                const Eigen::VectorXd con = fr < vals[hi] ? Eigen::VectorXd(centroid + 0.5 * (refl - centroid))
                                                          : Eigen::VectorXd(centroid + 0.5 * (pts[hi] - centroid));
                const double fc = f(con);
                ++evals;
                if (fc < std::min(fr, vals[hi])) {
                    pts[hi] = con;
                    vals[hi] = fc;
                } else {
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        if (i == lo) continue;
                        pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
                        vals[i] = f(pts[i]);
                        ++evals;
                    }
                }
            }
        }
        const auto argmin = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
        if (vals[argmin] <= best.value) best = {pts[argmin], vals[argmin]};
        step *= 0.1;
    }
    return best;
}

}  // namespace pcopt::testing
