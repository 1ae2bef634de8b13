#pragma once

#include "driftgmm/gmm.hpp"

namespace driftgmm {

/// Sentinel index returned when no Gaussian of the requested class exists.
inline constexpr std::size_t kNoGaussian = static_cast<std::size_t>(-1);

struct CloseResult {
    std::size_t index = kNoGaussian;
    double pertinence = 0.0;
};

/// Nearest same-class Gaussian: argmax of the density over components
/// labeled y (other classes contribute 0). Sentinel when class y owns no
/// Gaussian.
CloseResult gaussian_close(const GmmModel& model, const Eigen::VectorXd& x, int y);

/// Single-observation incremental update of one component: sp accumulates
/// the posterior, mean and covariance follow the incremental EM recurrences
/// and all weights are recomputed as sp_i / sum sp_j.
void update_gaussian(GmmModel& model, std::size_t index, const Eigen::VectorXd& x);

/// Appends Gaussian(mean = x, cov = cfc * I, sp = 1) for class y and
/// renormalizes all weights.
void create_gaussian(GmmModel& model, const Eigen::VectorXd& x, int y);

/// Virtual / non-severe real drift step: update the nearest same-class
/// Gaussian, then create a new one (and lower theta to the observed
/// pertinence) when the pertinence falls below the reach threshold.
void non_severe_adaptation(GmmModel& model, const Eigen::VectorXd& x, int y);

}  // namespace driftgmm
