#pragma once

#include <deque>
#include <optional>
#include <span>

#include "driftgmm/gmm.hpp"

namespace driftgmm {

/// Bounded FIFO store of past model snapshots. Oldest entries are evicted
/// once the capacity is exceeded.
class ModelPool {
public:
    struct Entry {
        GmmModel model;
        long stored_at = 0;
    };

    explicit ModelPool(std::size_t capacity = 20) : capacity_(capacity) {}

    void store(GmmModel model, long timestamp);

    /// Snapshot with the best prediction accuracy on `recent`; ties go to
    /// the most recently stored entry. Empty pool yields nullopt.
    std::optional<GmmModel> best_model(std::span<const Observation> recent) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const std::deque<Entry>& entries() const { return entries_; }

private:
    std::size_t capacity_;
    std::deque<Entry> entries_;
};

/// Fraction of `recent` the model predicts correctly.
double pool_accuracy(const GmmModel& model, std::span<const Observation> recent);

}  // namespace driftgmm
