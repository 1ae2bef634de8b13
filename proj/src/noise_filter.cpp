#include "driftgmm/noise_filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace driftgmm {

double kdn(const Eigen::VectorXd& x, int y,
           std::span<const Observation> reference_set, int k) {
    if (k < 1) throw std::invalid_argument("kdn requires k >= 1");

    struct Neighbor {
        double dist2;
        std::size_t index;
        int label;
    };
    std::vector<Neighbor> neighbors;
    neighbors.reserve(reference_set.size());
    bool self_skipped = false;
    for (std::size_t i = 0; i < reference_set.size(); ++i) {
        const auto& obs = reference_set[i];
        if (!self_skipped && obs.label == y && obs.features == x) {
            self_skipped = true;
            continue;
        }
        neighbors.push_back({(obs.features - x).squaredNorm(), i, obs.label});
    }
    if (neighbors.empty()) return 0.0;

    const std::size_t take = std::min(static_cast<std::size_t>(k), neighbors.size());
    std::partial_sort(neighbors.begin(), neighbors.begin() + take, neighbors.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          return a.dist2 != b.dist2 ? a.dist2 < b.dist2
                                                    : a.index < b.index;
                      });
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < take; ++i) {
        if (neighbors[i].label != y) ++disagree;
    }
    return static_cast<double>(disagree) / static_cast<double>(take);
}

std::vector<Observation> filter_training_set(std::vector<Observation> training_set,
                                             int k, double threshold,
                                             int* protected_count) {
    int kept_protected = 0;
    bool removed_any = true;
    while (removed_any && training_set.size() > static_cast<std::size_t>(k)) {
        removed_any = false;
        std::vector<double> scores(training_set.size());
        std::map<int, std::size_t> class_counts;
        for (std::size_t i = 0; i < training_set.size(); ++i) {
            scores[i] = kdn(training_set[i].features, training_set[i].label,
                            training_set, k);
            ++class_counts[training_set[i].label];
        }

        // Never empty a class: when a whole class is flagged, its
        // lowest-kDN members are kept.
        std::map<int, std::vector<std::size_t>> flagged;
        for (std::size_t i = 0; i < training_set.size(); ++i) {
            if (scores[i] > threshold) flagged[training_set[i].label].push_back(i);
        }
        std::vector<bool> remove(training_set.size(), false);
        for (auto& [label, indices] : flagged) {
            const std::size_t count = class_counts[label];
            const std::size_t keep = count > 2 ? count - 2 : count - 1;
            std::size_t removable = indices.size();
            if (indices.size() == count) {
                removable = std::min(removable, keep);
            }
            std::sort(indices.begin(), indices.end(),
                      [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
            for (std::size_t j = 0; j < indices.size(); ++j) {
                if (j < removable) {
                    remove[indices[j]] = true;
                } else {
                    ++kept_protected;
                }
            }
        }
        std::vector<Observation> survivors;
        survivors.reserve(training_set.size());
        for (std::size_t i = 0; i < training_set.size(); ++i) {
            if (remove[i]) {
                removed_any = true;
            } else {
                survivors.push_back(std::move(training_set[i]));
            }
        }
        training_set = std::move(survivors);
    }
    if (protected_count) *protected_count = kept_protected;
    return training_set;
}

void ValidationWindow::push(Observation obs) {
    entries_.push_back(std::move(obs));
    while (entries_.size() > capacity_) entries_.pop_front();
}

bool is_noisy(ValidationWindow& window, const Eigen::VectorXd& x, int y,
              int k, double threshold) {
    const auto snap = window.snapshot();
    const bool verdict = !snap.empty() && kdn(x, y, snap, k) > threshold;
    window.push(Observation{x, y, 0});
    return verdict;
}

}  // namespace driftgmm
