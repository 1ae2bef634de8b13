#include "driftgmm/types.hpp"

#include <cmath>

namespace driftgmm {

void regularize_covariance(Eigen::MatrixXd& cov, double floor) {
    Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd evals = es.eigenvalues();
    bool clipped = false;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals[i] < floor) {
            evals[i] = floor;
            clipped = true;
        }
    }
    if (clipped) {
        cov = es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
        cov = 0.5 * (cov + cov.transpose());
    } else {
        cov = sym;
    }
}

Gaussian::Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                   double weight, double sp, int label)
    : weight(weight), sp(sp), label(label),
      mean_(std::move(mean)), cov_(std::move(covariance)) {
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw dimension_error("covariance shape does not match mean dimension");
    }
}

void Gaussian::set_mean(Eigen::VectorXd mean) {
    if (mean.size() != mean_.size() && mean_.size() != 0) {
        throw dimension_error("mean dimension mismatch");
    }
    mean_ = std::move(mean);
}

void Gaussian::set_covariance(Eigen::MatrixXd covariance) {
    if (covariance.rows() != covariance.cols()) {
        throw dimension_error("covariance must be square");
    }
    cov_ = std::move(covariance);
    cache_ok_ = false;
}

void Gaussian::refresh_cache() const {
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success) {
        // Last-resort jitter; callers are expected to eigen-floor first.
        Eigen::MatrixXd jittered = cov_;
        jittered.diagonal().array() += 1e-12;
        llt_.compute(jittered);
        if (llt_.info() != Eigen::Success) {
            throw numeric_error("covariance is not positive definite");
        }
    }
    const double d = static_cast<double>(mean_.size());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < mean_.size(); ++i) {
        log_det += 2.0 * std::log(llt_.matrixL()(i, i));
    }
    log_norm_ = -0.5 * d * std::log(2.0 * M_PI) - 0.5 * log_det;
    cache_ok_ = true;
}

double Gaussian::log_density(const Eigen::VectorXd& x) const {
    if (x.size() != mean_.size()) {
        throw dimension_error("observation dimension does not match Gaussian");
    }
    if (!cache_ok_) refresh_cache();
    Eigen::VectorXd diff = x - mean_;
    double quad = llt_.matrixL().solve(diff).squaredNorm();
    double ld = log_norm_ - 0.5 * quad;
    if (std::isnan(ld)) {
        throw numeric_error("non-finite log-density");
    }
    return ld;
}

double Gaussian::density(const Eigen::VectorXd& x) const {
    return std::exp(log_density(x));
}

void GmmModel::renormalize_weights() {
    double total = sp_sum();
    if (total <= 0.0) {
        if (gaussians.empty()) return;
        double u = 1.0 / static_cast<double>(gaussians.size());
        for (auto& g : gaussians) g.weight = u;
        return;
    }
    for (auto& g : gaussians) g.weight = g.sp / total;
}

}  // namespace driftgmm
