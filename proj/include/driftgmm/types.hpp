#pragma once

#include <Eigen/Dense>
#include <set>
#include <stdexcept>
#include <vector>

namespace driftgmm {

/// One labeled stream element: feature vector, class label and stream index.
struct Observation {
    Eigen::VectorXd features;
    int label = 0;
    long timestamp = 0;
};

inline bool all_finite(const Eigen::VectorXd& v) {
    return v.allFinite();
}

/// Symmetric eigen-floor: clamps every eigenvalue of a symmetric matrix to
/// at least `floor`, keeping the matrix SPD after incremental updates.
void regularize_covariance(Eigen::MatrixXd& cov, double floor);

/// One mixture component. Mean/covariance go through setters so the cached
/// Cholesky factorization stays coherent.
class Gaussian {
public:
    Gaussian() = default;
    Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
             double weight, double sp, int label);

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }
    int dim() const { return static_cast<int>(mean_.size()); }

    void set_mean(Eigen::VectorXd mean);
    void set_covariance(Eigen::MatrixXd covariance);

    /// Multivariate normal log-density of x under this component.
    double log_density(const Eigen::VectorXd& x) const;
    /// Multivariate normal density (Eq. of the standard MVN pdf).
    double density(const Eigen::VectorXd& x) const;

    double weight = 0.0;
    double sp = 0.0;  // accumulated posterior probability
    int label = -1;

private:
    void refresh_cache() const;

    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    mutable Eigen::LLT<Eigen::MatrixXd> llt_;
    mutable double log_norm_ = 0.0;  // -d/2 log(2pi) - 1/2 log|Sigma|
    mutable bool cache_ok_ = false;
};

/// Full multi-class mixture classifier plus its reach threshold and the
/// isotropic covariance scale used for newly created Gaussians.
struct GmmModel {
    std::vector<Gaussian> gaussians;
    double theta = 0.0;  // reach: minimum same-class training pertinence
    double cfc = 1.0;    // creation radius (x_max - x_min) / radius_divisor
    int dim = 0;
    std::set<int> classes;

    /// Eigenvalue floor applied to every covariance estimate/update.
    double cov_floor() const { return 1e-6 * cfc * cfc; }

    double weight_sum() const {
        double s = 0.0;
        for (const auto& g : gaussians) s += g.weight;
        return s;
    }

    double sp_sum() const {
        double s = 0.0;
        for (const auto& g : gaussians) s += g.sp;
        return s;
    }

    /// Recomputes every weight as sp_i / sum_j sp_j.
    void renormalize_weights();

    bool empty() const { return gaussians.empty(); }
};

class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace driftgmm
