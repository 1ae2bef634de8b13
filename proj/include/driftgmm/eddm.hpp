#pragma once

#include <cstdint>

namespace driftgmm {

enum class DriftLevel { NORMAL, WARNING, DRIFT };

/// EDDM-style detector over the binary prediction-error stream. Tracks the
/// running mean and standard deviation of the distances (in steps) between
/// consecutive errors and compares p' + 2s' against its historical maximum;
/// the maximum is taken over the score's lower confidence bound so that the
/// early, high-variance estimates cannot inflate the baseline.
class EddmDetector {
public:
    struct Params {
        double alpha = 0.95;     // warning threshold on the ratio
        double beta = 0.90;      // base drift threshold
        double c_scale = 1.0;    // scales drift sensitivity: 1 - c*(1 - beta)
        int min_errors = 30;     // warm-up before levels can change
        double se_discount = 2.5;  // baseline uses score - discount * std.err.
    };

    EddmDetector() = default;
    explicit EddmDetector(const Params& params) : params_(params) {}

    DriftLevel update(bool error);
    void reset();

    DriftLevel level() const { return level_; }
    double distance_mean() const { return mean_; }
    double distance_std() const;
    double best_score() const { return best_score_; }
    long error_count() const { return error_count_; }
    const Params& params() const { return params_; }
    double drift_threshold() const {
        return 1.0 - params_.c_scale * (1.0 - params_.beta);
    }

private:
    Params params_;
    DriftLevel level_ = DriftLevel::NORMAL;
    long steps_since_error_ = 0;
    long error_count_ = 0;
    long distance_count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;  // Welford accumulator
    double best_score_ = 0.0;
};

}  // namespace driftgmm
