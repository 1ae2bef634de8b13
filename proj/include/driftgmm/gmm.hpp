#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "driftgmm/types.hpp"

namespace driftgmm {

/// Density of x under one mixture component, with dimension checking.
double density(const Gaussian& g, const Eigen::VectorXd& x);

/// Posterior responsibility of every component in `mixture` for x,
/// computed in log space. If every weighted log-density underflows the
/// smallest positive normal double, returns the uniform vector.
Eigen::VectorXd posterior(std::span<const Gaussian> mixture, const Eigen::VectorXd& x);
Eigen::VectorXd posterior(const GmmModel& model, const Eigen::VectorXd& x);

/// Label of the component with maximal posterior; ties break to the
/// lowest component index.
int predict(const GmmModel& model, const Eigen::VectorXd& x);

/// Sum over data of log sum_j P(x|C_j) w_j. Points whose mixture density
/// underflows are clamped to the smallest positive normal double;
/// `underflow_count`, when given, receives how many were clamped.
double log_likelihood(std::span<const Gaussian> mixture,
                      const std::vector<Eigen::VectorXd>& data,
                      int* underflow_count = nullptr);
double log_likelihood(const GmmModel& model,
                      const std::vector<Eigen::VectorXd>& data,
                      int* underflow_count = nullptr);

struct FitOptions {
    int kmax = 4;
    int iterations = 10;
    double cov_floor = 1e-6;
    bool maximize_aic = false;  // conventional AIC is minimized
};

/// Standard EM on a single-class mixture with k components. Components are
/// seeded from distinct random data points with the sample covariance.
/// A component whose responsibility mass drops below 1e-8 is re-seeded
/// from a random data point.
std::vector<Gaussian> fit_em(const std::vector<Eigen::VectorXd>& data,
                             int k, int iterations, std::mt19937_64& rng,
                             double cov_floor = 1e-6);

/// AIC for a k-component fit: 2*(3k) - 2*L.
double aic(int k, double log_lik);

/// Fits candidates for k = 1..kmax (capped so each component sees at least
/// d+1 points) and returns the one with the best AIC.
std::vector<Gaussian> select_k_and_fit(const std::vector<Eigen::VectorXd>& data,
                                       int kmax, int iterations,
                                       std::mt19937_64& rng,
                                       double cov_floor = 1e-6,
                                       bool maximize_aic = false);

struct TrainOptions {
    int kmax = 4;
    int iterations = 10;
    std::uint64_t seed = 0;
    double radius_divisor = 20.0;
    bool maximize_aic = false;
};

/// Batch initialization: one AIC-selected mixture per class, weights
/// rescaled by class frequency, sp_i = w_i * |T|, theta set to the lowest
/// same-class pertinence over T and cfc to the global feature range
/// divided by radius_divisor.
GmmModel train_initial(const std::vector<Observation>& training_set,
                       const TrainOptions& opts);

}  // namespace driftgmm
