#include "driftgmm/pool.hpp"

namespace driftgmm {

void ModelPool::store(GmmModel model, long timestamp) {
    entries_.push_back({std::move(model), timestamp});
    while (entries_.size() > capacity_) entries_.pop_front();
}

double pool_accuracy(const GmmModel& model, std::span<const Observation> recent) {
    if (recent.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& obs : recent) {
        if (predict(model, obs.features) == obs.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(recent.size());
}

std::optional<GmmModel> ModelPool::best_model(std::span<const Observation> recent) const {
    if (recent.empty()) throw std::invalid_argument("best_model needs recent data");
    if (entries_.empty()) return std::nullopt;
    std::size_t best = 0;
    double best_acc = -1.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        double acc = pool_accuracy(entries_[i].model, recent);
        if (acc >= best_acc) {  // >= keeps the most recent on ties
            best = i;
            best_acc = acc;
        }
    }
    return entries_[best].model;
}

}  // namespace driftgmm
