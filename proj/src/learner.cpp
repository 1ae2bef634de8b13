#include "driftgmm/learner.hpp"

#include <cmath>

namespace driftgmm {

void LearnerConfig::validate() const {
    if (m < 10) throw std::invalid_argument("m must be >= 10");
    if (kmax < 1 || em_iterations < 0 || kdn_k < 1 || pool_capacity < 1) {
        throw std::invalid_argument("counts must be positive");
    }
    if (radius_divisor <= 0.0) throw std::invalid_argument("radius_divisor must be > 0");
}

LearnerConfig ablation_config(LearnerConfig base, const AblationFlags& disable) {
    base.ablation = disable;
    return base;
}

Learner::Learner(LearnerConfig config)
    : config_(std::move(config)),
      window_(static_cast<std::size_t>(config_.m)),
      detector_(config_.detector),
      pool_(config_.pool_capacity),
      rng_(config_.seed) {
    config_.validate();
    collect_buffer_.reserve(static_cast<std::size_t>(config_.m));
}

int Learner::fallback_prediction() const {
    int best = 0;
    long count = -1;
    for (const auto& [label, c] : label_counts_) {
        if (c > count) {
            best = label;
            count = c;
        }
    }
    return best;
}

void Learner::retrain(const std::vector<Observation>& batch) {
    auto filtered = filter_training_set(batch, config_.kdn_k, config_.kdn_threshold);
    TrainOptions opts;
    opts.kmax = config_.kmax;
    opts.iterations = config_.em_iterations;
    opts.seed = rng_();
    opts.radius_divisor = config_.radius_divisor;
    model_ = train_initial(filtered, opts);
    window_.clear();
    for (const auto& obs : batch) window_.push(obs);
    detector_.reset();
    collect_buffer_.clear();
    warning_active_ = false;
    swapped_from_pool_ = false;
    ++retrain_count_;
}

void Learner::append_collect(const Observation& obs) {
    collect_buffer_.push_back(obs);
    const auto cap = static_cast<std::size_t>(config_.m);
    if (collect_buffer_.size() > cap) {
        collect_buffer_.erase(collect_buffer_.begin(),
                              collect_buffer_.end() - static_cast<long>(cap));
    }
}

EventRecord Learner::process(const Eigen::VectorXd& x, int y_true) {
    EventRecord rec;
    rec.timestamp = clock_;
    rec.true_label = y_true;
    rec.phase = phase_;

    if (!all_finite(x)) {
        ++rejected_count_;
        rec.rejected = true;
        rec.prediction = fallback_prediction();
        rec.error = rec.prediction != y_true;
        rec.level = detector_.level();
        rec.gaussian_count = model_.gaussians.size();
        rec.pool_size = pool_.size();
        ++clock_;
        return rec;
    }

    const Observation obs{x, y_true, clock_};

    if (phase_ == Phase::BOOTSTRAP) {
        rec.prediction = fallback_prediction();
        rec.error = rec.prediction != y_true;
        ++label_counts_[y_true];
        collect_buffer_.push_back(obs);
        if (collect_buffer_.size() >= static_cast<std::size_t>(config_.m)) {
            retrain(collect_buffer_);
            phase_ = Phase::ONLINE;
        }
        rec.level = detector_.level();
        rec.gaussian_count = model_.gaussians.size();
        rec.pool_size = pool_.size();
        ++clock_;
        return rec;
    }

    rec.prediction = predict(model_, x);
    rec.error = rec.prediction != y_true;
    ++label_counts_[y_true];

    // On-line noise gate; the window slides over the raw stream either way.
    bool noisy = is_noisy(window_, x, y_true, config_.kdn_k, config_.kdn_threshold);
    if (config_.ablation.filter) noisy = false;

    if (model_.classes.count(y_true) == 0) {
        create_gaussian(model_, x, y_true);
    } else if (!noisy && !config_.ablation.non_severe) {
        non_severe_adaptation(model_, x, y_true);
        ++adaptation_count_;
    }

    if (phase_ == Phase::ONLINE) {
        if (!config_.ablation.severe) {
            const DriftLevel before = detector_.level();
            const DriftLevel after = detector_.update(rec.error);
            if (after == DriftLevel::WARNING && before == DriftLevel::NORMAL) {
                pool_.store(model_, clock_);
                collect_buffer_.clear();
                warning_active_ = true;
            } else if (after == DriftLevel::NORMAL && warning_active_) {
                collect_buffer_.clear();
                warning_active_ = false;
            }
            if (after != DriftLevel::NORMAL) {
                append_collect(obs);
            }
            if (after == DriftLevel::DRIFT) {
                phase_ = Phase::COLLECTING;
                swapped_from_pool_ = false;
                drift_timestamps_.push_back(clock_);
            }
        }
    } else {  // COLLECTING
        append_collect(obs);
        const auto swap_at = static_cast<std::size_t>(
            std::ceil(0.30 * static_cast<double>(config_.m)));
        if (!swapped_from_pool_ && collect_buffer_.size() >= swap_at) {
            if (!config_.ablation.pool) {
                if (auto best = pool_.best_model(collect_buffer_)) {
                    model_ = std::move(*best);
                    ++pool_swap_count_;
                }
            }
            swapped_from_pool_ = true;
        }
        if (collect_buffer_.size() >= static_cast<std::size_t>(config_.m)) {
            pool_.store(model_, clock_);
            retrain(collect_buffer_);
            phase_ = Phase::ONLINE;
        }
    }

    rec.level = detector_.level();
    rec.gaussian_count = model_.gaussians.size();
    rec.pool_size = pool_.size();
    ++clock_;
    return rec;
}

}  // namespace driftgmm
