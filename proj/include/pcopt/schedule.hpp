#pragma once

#include "pcopt/optimizer.hpp"

#include <span>
#include <vector>

namespace pcopt {

struct GeometricSchedule {
    double beta0 = 0.0;
    double k_beta = 1.0;
};

struct ScheduleFit {
    /// Least squares on beta_t = beta0 * k^t.
    GeometricSchedule nonlinear;
    /// Ordinary least squares on log beta_t = log beta0 + t log k.
    GeometricSchedule log_linear;
};

/// Fits beta0 * k^t to pooled (iteration, beta) pairs both ways.
ScheduleFit fit_geometric_schedule(std::span<const double> iterations, std::span<const double> betas);

/// Pools the beta trajectories of all traces; each needs >= 2 records.
ScheduleFit fit_geometric_schedule(const std::vector<RunTrace>& traces);

}  // namespace pcopt
