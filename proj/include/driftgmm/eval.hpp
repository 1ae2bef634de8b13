#pragma once

#include <map>
#include <string>
#include <vector>

#include "driftgmm/learner.hpp"

namespace driftgmm {

struct RunResult {
    std::vector<EventRecord> events;
    double overall_accuracy = 0.0;
    double gmean = 0.0;
    std::vector<std::pair<int, double>> aot;  // (batch index, accuracy)
    double runtime_seconds = 0.0;
    std::string run_id;
    std::string dataset_id;
    std::string config_id;
};

/// Test-then-train pass over the whole stream with per-batch accuracies.
RunResult prequential_run(const std::vector<Observation>& stream,
                          const LearnerConfig& config, int batch_size);

/// Geometric mean of per-class recalls; classes absent from the truth are
/// excluded (counted in `excluded` when given).
double gmean(const std::map<int, std::pair<long, long>>& per_class_correct_total,
             int* excluded = nullptr);
double gmean_of_events(const std::vector<EventRecord>& events, int* excluded = nullptr);

/// Stream cross-validation: run r (1-based) deletes the observation at
/// offset r-1 of every consecutive block of `period`, preserving order.
std::vector<Observation> cv_stream(const std::vector<Observation>& stream,
                                   int period, int run);
std::vector<RunResult> stream_cv(const std::vector<Observation>& stream,
                                 const LearnerConfig& config, int batch_size,
                                 int period = 30, int runs = 30);

struct FriedmanResult {
    std::vector<double> average_ranks;  // rank 1 = best (highest score)
    double chi_square = 0.0;
    double p_value = 1.0;
    double critical_difference = 0.0;  // Nemenyi CD at alpha = 0.05
};

/// Friedman test over a scores matrix (rows = approaches, columns =
/// datasets; higher scores are better) with the Nemenyi critical
/// difference.
FriedmanResult friedman_nemenyi(const std::vector<std::vector<double>>& scores);

/// Two-sided Wilcoxon signed-rank p-value (normal approximation with tie
/// correction); zero differences are dropped, all-zero pairs give p = 1.
double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b);

}  // namespace driftgmm
