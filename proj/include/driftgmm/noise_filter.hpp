#pragma once

#include <deque>
#include <span>

#include "driftgmm/types.hpp"

namespace driftgmm {

/// k-Disagreeing Neighbors: fraction of the k nearest neighbors of x in
/// `reference_set` (Euclidean distance, ties by lower index) whose label
/// differs from y. One exact duplicate of (x, y) is excluded so a set can
/// be filtered against itself. Fewer than k entries means all are used.
double kdn(const Eigen::VectorXd& x, int y,
           std::span<const Observation> reference_set, int k = 5);

/// Removes observations whose kDN exceeds `threshold`, re-applying the
/// test until no observation is above it. A class is never emptied: its
/// two lowest-kDN observations are kept; `protected_count`, when given,
/// receives how many flagged observations were retained that way.
std::vector<Observation> filter_training_set(std::vector<Observation> training_set,
                                             int k = 5, double threshold = 0.8,
                                             int* protected_count = nullptr);

/// Sliding window over the raw stream used for on-line noise gating.
class ValidationWindow {
public:
    explicit ValidationWindow(std::size_t capacity) : capacity_(capacity) {}

    void push(Observation obs);
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const std::deque<Observation>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

    /// Oldest-first snapshot for kNN scans.
    std::vector<Observation> snapshot() const {
        return {entries_.begin(), entries_.end()};
    }

private:
    std::size_t capacity_;
    std::deque<Observation> entries_;
};

/// On-line gate: true iff the kDN of (x, y) against the current window
/// exceeds `threshold`. The observation is inserted into the window
/// afterwards regardless of the verdict, so gradual drifts accumulate
/// same-class evidence.
bool is_noisy(ValidationWindow& window, const Eigen::VectorXd& x, int y,
              int k = 5, double threshold = 0.8);

}  // namespace driftgmm
