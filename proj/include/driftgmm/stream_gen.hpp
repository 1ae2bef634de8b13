#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "driftgmm/types.hpp"

namespace driftgmm {

enum class TransitionKind { ABRUPT, GRADUAL, INCREMENTAL };

struct GaussianCluster {
    Eigen::Vector2d center;
    double sigma = 0.5;
};

/// One stationary concept: a pure labeling rule over the feature vector
/// plus its input sampler (uniform box or per-class cluster mixture).
struct ConceptSpec {
    enum class Rule { SINE1, SINE2, SEA, CIRCLE, CLUSTERS };

    Rule rule = Rule::SINE1;
    bool reversed = false;                 // sine variants
    double sea_threshold = 8.0;            // SEA decision rule
    Eigen::Vector2d circle_center{0.5, 0.5};
    double circle_radius = 0.2;
    std::vector<std::vector<GaussianCluster>> clusters;  // per class

    Eigen::VectorXd box_lo;
    Eigen::VectorXd box_hi;

    int dim() const { return static_cast<int>(box_lo.size()); }
    int n_classes() const;
    int label_of(const Eigen::VectorXd& x) const;
};

/// Linear interpolation of the drifting concept parameters (incremental
/// transitions). Only rule parameters move; samplers stay fixed.
ConceptSpec interpolate(const ConceptSpec& from, const ConceptSpec& to, double t);

struct ConceptSchedule {
    std::string name;
    std::vector<ConceptSpec> concepts;
    int concept_size = 2000;   // nominal size, as reported
    int total_examples = 0;
    TransitionKind transition = TransitionKind::ABRUPT;
    int gradual_width = 0;
    double noise_rate = 0.0;
    std::uint64_t seed = 42;
    std::vector<double> class_probs;

    int dim() const { return concepts.front().dim(); }
    int n_classes() const { return static_cast<int>(class_probs.size()); }
    /// Start index of every concept; total split as evenly as possible.
    std::vector<long> boundaries() const;
};

/// Deterministic synthetic stream: class drawn per the schedule's class
/// proportions, features rejection-sampled to match the active labeling,
/// labels flipped to a random other class with probability noise_rate.
std::vector<Observation> generate(const ConceptSchedule& schedule);

/// Built-in datasets: virtual5, virtual9, circles, sine1, sine2, sea, searec.
ConceptSchedule builtin_schedule(const std::string& name);

/// Percentage of the input space whose target class changes from concept a
/// to concept b, estimated on n_samples random inputs with label noise
/// applied to the new concept's labels. For cluster concepts, inputs
/// landing where a's sampler has (numerically) zero density count as
/// changed.
double severity(const ConceptSpec& a, const ConceptSpec& b,
                int n_samples = 2000, double noise_rate = 0.10,
                std::uint64_t seed = 1);

/// severity() for every consecutive concept pair of a schedule.
std::vector<double> schedule_severities(const ConceptSchedule& schedule,
                                        int n_samples = 2000,
                                        double noise_rate = 0.10,
                                        std::uint64_t seed = 1);

/// CSV export: header a1,...,ad,label then one observation per row.
void write_stream_csv(std::ostream& out, const std::vector<Observation>& stream);

}  // namespace driftgmm
