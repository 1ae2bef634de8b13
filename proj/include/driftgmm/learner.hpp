#pragma once

#include <map>
#include <string>
#include <vector>

#include "driftgmm/adapt.hpp"
#include "driftgmm/eddm.hpp"
#include "driftgmm/gmm.hpp"
#include "driftgmm/noise_filter.hpp"
#include "driftgmm/pool.hpp"

namespace driftgmm {

enum class Phase { BOOTSTRAP, ONLINE, COLLECTING };

/// Mechanisms that can be switched off for ablation studies.
struct AblationFlags {
    bool non_severe = false;  // skip the per-observation adaptation
    bool severe = false;      // detector never fires, no retrains
    bool pool = false;        // best_model always comes back empty
    bool filter = false;      // on-line noise gate always passes
};

struct LearnerConfig {
    int m = 50;                    // training window size
    int kmax = 4;
    int em_iterations = 10;
    double radius_divisor = 20.0;
    std::size_t pool_capacity = 20;
    int kdn_k = 5;
    double kdn_threshold = 0.8;
    EddmDetector::Params detector;
    std::uint64_t seed = 0;
    AblationFlags ablation;

    void validate() const;
};

LearnerConfig ablation_config(LearnerConfig base, const AblationFlags& disable);

/// One line of the per-observation event log.
struct EventRecord {
    long timestamp = 0;
    int prediction = 0;
    int true_label = 0;
    bool error = false;
    DriftLevel level = DriftLevel::NORMAL;
    std::size_t gaussian_count = 0;
    std::size_t pool_size = 0;
    Phase phase = Phase::BOOTSTRAP;
    bool rejected = false;
};

/// The OGMMF-VRD state machine: bootstrap batch training, on-line
/// classification with noise-gated adaptation, EDDM monitoring and
/// pool-assisted recovery plus full retrain on drift.
class Learner {
public:
    explicit Learner(LearnerConfig config);

    /// Test-then-train step: predicts x, then learns from (x, y_true).
    EventRecord process(const Eigen::VectorXd& x, int y_true);

    Phase phase() const { return phase_; }
    const GmmModel& model() const { return model_; }
    const ModelPool& pool() const { return pool_; }
    const EddmDetector& detector() const { return detector_; }
    const LearnerConfig& config() const { return config_; }

    long adaptation_count() const { return adaptation_count_; }
    long rejected_count() const { return rejected_count_; }
    long retrain_count() const { return retrain_count_; }
    long pool_swap_count() const { return pool_swap_count_; }
    const std::vector<long>& drift_timestamps() const { return drift_timestamps_; }

private:
    int fallback_prediction() const;
    void retrain(const std::vector<Observation>& batch);
    void append_collect(const Observation& obs);

    LearnerConfig config_;
    GmmModel model_;
    ValidationWindow window_;
    EddmDetector detector_;
    ModelPool pool_;
    Phase phase_ = Phase::BOOTSTRAP;
    std::vector<Observation> collect_buffer_;
    bool warning_active_ = false;
    bool swapped_from_pool_ = false;
    std::mt19937_64 rng_;
    long clock_ = 0;
    std::map<int, long> label_counts_;

    long adaptation_count_ = 0;
    long rejected_count_ = 0;
    long retrain_count_ = 0;
    long pool_swap_count_ = 0;
    std::vector<long> drift_timestamps_;
};

}  // namespace driftgmm
