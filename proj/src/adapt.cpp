#include "driftgmm/adapt.hpp"

namespace driftgmm {

CloseResult gaussian_close(const GmmModel& model, const Eigen::VectorXd& x, int y) {
    if (model.empty()) throw std::invalid_argument("gaussian_close on empty model");
    CloseResult r;
    for (std::size_t i = 0; i < model.gaussians.size(); ++i) {
        const auto& g = model.gaussians[i];
        if (g.label != y) continue;
        double p = g.density(x);
        if (r.index == kNoGaussian || p > r.pertinence) {
            r.index = i;
            r.pertinence = p;
        }
    }
    return r;
}

void update_gaussian(GmmModel& model, std::size_t index, const Eigen::VectorXd& x) {
    if (index >= model.gaussians.size()) {
        throw std::invalid_argument("update_gaussian: index out of range");
    }
    const double p = posterior(model, x)[static_cast<Eigen::Index>(index)];
    Gaussian& g = model.gaussians[index];
    g.sp += p;

    const Eigen::VectorXd old_mean = g.mean();
    Eigen::VectorXd new_mean = old_mean + (p / g.sp) * (x - old_mean);
    Eigen::VectorXd dmu = new_mean - old_mean;
    Eigen::VectorXd dx = x - new_mean;

    Eigen::MatrixXd cov = g.covariance();
    cov += -dmu * dmu.transpose() + (p / g.sp) * (dx * dx.transpose() - cov);
    regularize_covariance(cov, model.cov_floor());

    g.set_mean(std::move(new_mean));
    g.set_covariance(std::move(cov));
    model.renormalize_weights();
}

void create_gaussian(GmmModel& model, const Eigen::VectorXd& x, int y) {
    const auto d = x.size();
    model.gaussians.emplace_back(
        x, model.cfc * Eigen::MatrixXd::Identity(d, d), 0.0, 1.0, y);
    model.classes.insert(y);
    if (model.dim == 0) model.dim = static_cast<int>(d);
    model.renormalize_weights();
}

void non_severe_adaptation(GmmModel& model, const Eigen::VectorXd& x, int y) {
    CloseResult near = gaussian_close(model, x, y);
    if (near.index == kNoGaussian) {
        create_gaussian(model, x, y);
        return;
    }
    update_gaussian(model, near.index, x);
    if (near.pertinence < model.theta) {
        create_gaussian(model, x, y);
        model.theta = near.pertinence;
    }
}

}  // namespace driftgmm
