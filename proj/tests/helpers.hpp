#pragma once

#include <random>
#include <vector>

#include "driftgmm/gmm.hpp"

namespace testutil {

using driftgmm::Gaussian;
using driftgmm::GmmModel;
using driftgmm::Observation;

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

inline Eigen::MatrixXd random_spd(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = n(rng);
    return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

inline Eigen::VectorXd random_vec(int d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = n(rng);
    return v;
}

/// Direct evaluation of the multivariate normal pdf via explicit inverse
/// and determinant; the independent oracle for density().
inline double density_oracle(const Eigen::VectorXd& mean,
                             const Eigen::MatrixXd& cov,
                             const Eigen::VectorXd& x) {
    const double d = static_cast<double>(mean.size());
    const Eigen::VectorXd diff = x - mean;
    const double quad = diff.transpose() * cov.inverse() * diff;
    const double norm = std::pow(2.0 * M_PI, -d / 2.0) / std::sqrt(cov.determinant());
    return norm * std::exp(-0.5 * quad);
}

inline GmmModel model_1d(std::initializer_list<double> means,
                         std::initializer_list<int> labels,
                         double sigma2 = 1.0) {
    GmmModel m;
    m.dim = 1;
    const double w = 1.0 / static_cast<double>(means.size());
    auto lab = labels.begin();
    for (double mu : means) {
        m.gaussians.emplace_back(vec({mu}),
                                 sigma2 * Eigen::MatrixXd::Identity(1, 1), w, w, *lab);
        m.classes.insert(*lab++);
    }
    return m;
}

/// Two well-separated Gaussian blobs, one per class.
inline std::vector<Observation> two_blobs(int per_class, double sep,
                                          std::mt19937_64& rng, int d = 2,
                                          double sigma = 0.3) {
    std::normal_distribution<double> n(0.0, sigma);
    std::vector<Observation> out;
    long t = 0;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < per_class; ++i) {
            Eigen::VectorXd x(d);
            for (int j = 0; j < d; ++j) x[j] = n(rng) + (c == 0 ? 0.0 : sep);
            out.push_back({std::move(x), c, t++});
        }
    }
    return out;
}

}  // namespace testutil
