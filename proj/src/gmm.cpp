#include "driftgmm/gmm.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace driftgmm {

namespace {

constexpr double kLogMinNormal = -708.396418532264;  // log(DBL_MIN)

Eigen::VectorXd sample_mean(const std::vector<Eigen::VectorXd>& data) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(data.front().size());
    for (const auto& x : data) m += x;
    return m / static_cast<double>(data.size());
}

// MLE (1/n) covariance.
Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& data,
                                  const Eigen::VectorXd& mean) {
    const auto d = mean.size();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& x : data) {
        Eigen::VectorXd diff = x - mean;
        cov += diff * diff.transpose();
    }
    return cov / static_cast<double>(data.size());
}

std::vector<std::size_t> distinct_indices(std::size_t n, std::size_t k,
                                          std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

double density(const Gaussian& g, const Eigen::VectorXd& x) {
    return g.density(x);
}

Eigen::VectorXd posterior(std::span<const Gaussian> mixture, const Eigen::VectorXd& x) {
    const auto k = static_cast<Eigen::Index>(mixture.size());
    if (k == 0) throw std::invalid_argument("posterior on empty mixture");
    Eigen::VectorXd logterm(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& g = mixture[static_cast<std::size_t>(i)];
        logterm[i] = g.weight > 0.0
                         ? g.log_density(x) + std::log(g.weight)
                         : -std::numeric_limits<double>::infinity();
    }
    const double mx = logterm.maxCoeff();
    if (!std::isfinite(mx) || mx < kLogMinNormal) {
        return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    }
    Eigen::VectorXd p = (logterm.array() - mx).exp();
    return p / p.sum();
}

Eigen::VectorXd posterior(const GmmModel& model, const Eigen::VectorXd& x) {
    return posterior(std::span<const Gaussian>(model.gaussians), x);
}

int predict(const GmmModel& model, const Eigen::VectorXd& x) {
    if (model.empty()) throw std::invalid_argument("predict on empty model");
    Eigen::VectorXd p = posterior(model, x);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    return model.gaussians[static_cast<std::size_t>(best)].label;
}

double log_likelihood(std::span<const Gaussian> mixture,
                      const std::vector<Eigen::VectorXd>& data,
                      int* underflow_count) {
    if (data.empty()) throw std::invalid_argument("log_likelihood on empty data");
    double total = 0.0;
    int clamped = 0;
    for (const auto& x : data) {
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(mixture.size());
        for (const auto& g : mixture) {
            double t = g.weight > 0.0
                           ? g.log_density(x) + std::log(g.weight)
                           : -std::numeric_limits<double>::infinity();
            terms.push_back(t);
            mx = std::max(mx, t);
        }
        double ll;
        if (!std::isfinite(mx) || mx < kLogMinNormal) {
            ll = kLogMinNormal;
            ++clamped;
        } else {
            double s = 0.0;
            for (double t : terms) s += std::exp(t - mx);
            ll = mx + std::log(s);
        }
        total += ll;
    }
    if (underflow_count) *underflow_count = clamped;
    return total;
}

double log_likelihood(const GmmModel& model,
                      const std::vector<Eigen::VectorXd>& data,
                      int* underflow_count) {
    return log_likelihood(std::span<const Gaussian>(model.gaussians), data,
                          underflow_count);
}

std::vector<Gaussian> fit_em(const std::vector<Eigen::VectorXd>& data,
                             int k, int iterations, std::mt19937_64& rng,
                             double cov_floor) {
    if (k < 1) throw std::invalid_argument("fit_em requires k >= 1");
    const auto n = data.size();
    if (n < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("fit_em requires |data| >= k");
    }

    const Eigen::VectorXd mean = sample_mean(data);
    Eigen::MatrixXd init_cov = sample_covariance(data, mean);
    regularize_covariance(init_cov, cov_floor);

    std::vector<Gaussian> mix;
    mix.reserve(static_cast<std::size_t>(k));
    for (std::size_t i : distinct_indices(n, static_cast<std::size_t>(k), rng)) {
        mix.emplace_back(data[i], init_cov, 1.0 / k, 0.0, -1);
    }

    for (int it = 0; it < iterations; ++it) {
        // E-step
        Eigen::MatrixXd resp(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            resp.row(static_cast<Eigen::Index>(i)) =
                posterior(std::span<const Gaussian>(mix), data[i]).transpose();
        }
        // M-step
        for (int j = 0; j < k; ++j) {
            double nk = resp.col(j).sum();
            if (nk < 1e-8) {
                std::uniform_int_distribution<std::size_t> pick(0, n - 1);
                mix[static_cast<std::size_t>(j)].set_mean(data[pick(rng)]);
                mix[static_cast<std::size_t>(j)].set_covariance(init_cov);
                mix[static_cast<std::size_t>(j)].weight = 1.0 / k;
                continue;
            }
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(mean.size());
            for (std::size_t i = 0; i < n; ++i) {
                mu += resp(static_cast<Eigen::Index>(i), j) * data[i];
            }
            mu /= nk;
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(mean.size(), mean.size());
            for (std::size_t i = 0; i < n; ++i) {
                Eigen::VectorXd diff = data[i] - mu;
                cov += resp(static_cast<Eigen::Index>(i), j) * diff * diff.transpose();
            }
            cov /= nk;
            regularize_covariance(cov, cov_floor);
            auto& g = mix[static_cast<std::size_t>(j)];
            g.set_mean(std::move(mu));
            g.set_covariance(std::move(cov));
            g.weight = nk / static_cast<double>(n);
        }
        double wsum = 0.0;
        for (const auto& g : mix) wsum += g.weight;
        for (auto& g : mix) g.weight /= wsum;
    }
    return mix;
}

double aic(int k, double log_lik) {
    return 2.0 * (3.0 * k) - 2.0 * log_lik;
}

std::vector<Gaussian> select_k_and_fit(const std::vector<Eigen::VectorXd>& data,
                                       int kmax, int iterations,
                                       std::mt19937_64& rng,
                                       double cov_floor, bool maximize_aic) {
    if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
    const int d = static_cast<int>(data.front().size());
    const int cap = std::max(1, static_cast<int>(data.size()) / (d + 1));
    const int khigh = std::min(kmax, cap);

    std::vector<Gaussian> best;
    double best_aic = 0.0;
    bool have_best = false;
    for (int k = 1; k <= khigh; ++k) {
        try {
            auto candidate = fit_em(data, k, iterations, rng, cov_floor);
            double score = aic(k, log_likelihood(std::span<const Gaussian>(candidate), data));
            bool better = !have_best ||
                          (maximize_aic ? score > best_aic : score < best_aic);
            if (better) {
                best = std::move(candidate);
                best_aic = score;
                have_best = true;
            }
        } catch (const std::exception&) {
            // candidate failed; try the next k
        }
    }
    if (!have_best) {
        return fit_em(data, 1, iterations, rng, cov_floor);
    }
    return best;
}

GmmModel train_initial(const std::vector<Observation>& training_set,
                       const TrainOptions& opts) {
    if (training_set.empty()) {
        throw std::invalid_argument("train_initial on empty training set");
    }
    const int d = static_cast<int>(training_set.front().features.size());

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::map<int, std::vector<Eigen::VectorXd>> by_class;
    for (const auto& obs : training_set) {
        if (obs.features.size() != d) {
            throw dimension_error("training set has mixed dimensionality");
        }
        lo = std::min(lo, obs.features.minCoeff());
        hi = std::max(hi, obs.features.maxCoeff());
        by_class[obs.label].push_back(obs.features);
    }

    GmmModel model;
    model.dim = d;
    model.cfc = std::max(hi - lo, 1e-9) / opts.radius_divisor;
    const double floor = model.cov_floor();

    std::mt19937_64 rng(opts.seed);
    const double total = static_cast<double>(training_set.size());
    for (auto& [label, points] : by_class) {
        model.classes.insert(label);
        if (points.size() < 2) {
            model.gaussians.emplace_back(
                points.front(), model.cfc * Eigen::MatrixXd::Identity(d, d),
                1.0 / total, 0.0, label);
            continue;
        }
        auto mix = select_k_and_fit(points, opts.kmax, opts.iterations, rng,
                                    floor, opts.maximize_aic);
        const double freq = static_cast<double>(points.size()) / total;
        for (auto& g : mix) {
            g.weight *= freq;
            g.label = label;
            model.gaussians.push_back(std::move(g));
        }
    }

    for (auto& g : model.gaussians) g.sp = g.weight * total;

    // Reach: lowest same-class pertinence over the training set.
    double theta = std::numeric_limits<double>::infinity();
    for (const auto& obs : training_set) {
        double best = 0.0;
        for (const auto& g : model.gaussians) {
            if (g.label != obs.label) continue;
            best = std::max(best, g.density(obs.features));
        }
        theta = std::min(theta, best);
    }
    model.theta = std::isfinite(theta) ? theta : 0.0;
    return model;
}

}  // namespace driftgmm
