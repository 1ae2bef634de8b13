#include "driftgmm/eddm.hpp"

#include <algorithm>
#include <cmath>

namespace driftgmm {

double EddmDetector::distance_std() const {
    if (distance_count_ < 2) return 0.0;
    return std::sqrt(m2_ / static_cast<double>(distance_count_));
}

DriftLevel EddmDetector::update(bool error) {
    ++steps_since_error_;
    if (!error) {
        return level_;
    }

    ++error_count_;
    if (error_count_ > 1) {
        // Distance between this error and the previous one, Welford update.
        const double dist = static_cast<double>(steps_since_error_);
        ++distance_count_;
        const double delta = dist - mean_;
        mean_ += delta / static_cast<double>(distance_count_);
        m2_ += delta * (dist - mean_);
    }
    steps_since_error_ = 0;

    if (distance_count_ < 2) return level_;
    const double s = distance_std();
    const double score = mean_ + 2.0 * s;
    // Baseline = running max of the score's lower confidence bound. Using
    // the raw score would let early sampling noise inflate the baseline and
    // fire spurious drifts as the estimate converges; the standard error
    // discount (Var(mean) = s^2/n, Var(s) ~ s^2/2n) removes that bias.
    const double se = s * std::sqrt(3.0 / static_cast<double>(distance_count_));
    best_score_ = std::max(best_score_, score - params_.se_discount * se);

    if (error_count_ < params_.min_errors || best_score_ <= 0.0) {
        return level_;
    }
    const double ratio = score / best_score_;
    if (level_ != DriftLevel::DRIFT) {
        if (ratio < drift_threshold()) {
            level_ = DriftLevel::DRIFT;
        } else if (ratio < params_.alpha) {
            level_ = DriftLevel::WARNING;
        } else {
            level_ = DriftLevel::NORMAL;
        }
    }
    return level_;
}

void EddmDetector::reset() {
    level_ = DriftLevel::NORMAL;
    steps_since_error_ = 0;
    error_count_ = 0;
    distance_count_ = 0;
    mean_ = 0.0;
    m2_ = 0.0;
    best_score_ = 0.0;
}

}  // namespace driftgmm
