#include "driftgmm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

namespace driftgmm {

RunResult prequential_run(const std::vector<Observation>& stream,
                          const LearnerConfig& config, int batch_size) {
    if (stream.empty()) throw std::invalid_argument("empty stream");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

    RunResult result;
    result.events.reserve(stream.size());
    Learner learner(config);

    const auto start = std::chrono::steady_clock::now();
    long correct = 0;
    long batch_correct = 0;
    int batch_count = 0;
    int batch_index = 0;
    for (const auto& obs : stream) {
        EventRecord rec = learner.process(obs.features, obs.label);
        if (!rec.error) {
            ++correct;
            ++batch_correct;
        }
        ++batch_count;
        if (batch_count == batch_size) {
            result.aot.emplace_back(batch_index++,
                                    static_cast<double>(batch_correct) / batch_size);
            batch_correct = 0;
            batch_count = 0;
        }
        result.events.push_back(std::move(rec));
    }
    if (batch_count > 0) {
        result.aot.emplace_back(batch_index,
                                static_cast<double>(batch_correct) / batch_count);
    }
    const auto end = std::chrono::steady_clock::now();
    result.runtime_seconds = std::chrono::duration<double>(end - start).count();
    result.overall_accuracy =
        static_cast<double>(correct) / static_cast<double>(stream.size());
    result.gmean = gmean_of_events(result.events);
    return result;
}

double gmean(const std::map<int, std::pair<long, long>>& per_class,
             int* excluded) {
    int skipped = 0;
    double log_sum = 0.0;
    int used = 0;
    for (const auto& [label, counts] : per_class) {
        const auto [ok, total] = counts;
        if (total == 0) {
            ++skipped;
            continue;
        }
        const double recall = static_cast<double>(ok) / static_cast<double>(total);
        if (recall == 0.0) {
            if (excluded) *excluded = skipped;
            return 0.0;
        }
        log_sum += std::log(recall);
        ++used;
    }
    if (excluded) *excluded = skipped;
    if (used == 0) return 0.0;
    return std::exp(log_sum / used);
}

double gmean_of_events(const std::vector<EventRecord>& events, int* excluded) {
    std::map<int, std::pair<long, long>> per_class;
    for (const auto& e : events) {
        auto& [ok, total] = per_class[e.true_label];
        ++total;
        if (!e.error) ++ok;
    }
    return gmean(per_class, excluded);
}

std::vector<Observation> cv_stream(const std::vector<Observation>& stream,
                                   int period, int run) {
    if (period < 1 || run < 1 || run > period) {
        throw std::invalid_argument("cv_stream: invalid period/run");
    }
    if (stream.size() < static_cast<std::size_t>(period)) {
        throw std::invalid_argument("stream shorter than the cv period");
    }
    std::vector<Observation> out;
    out.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (static_cast<int>(i % static_cast<std::size_t>(period)) == run - 1) continue;
        out.push_back(stream[i]);
    }
    return out;
}

std::vector<RunResult> stream_cv(const std::vector<Observation>& stream,
                                 const LearnerConfig& config, int batch_size,
                                 int period, int runs) {
    if (runs > period) throw std::invalid_argument("runs must be <= period");
    std::vector<RunResult> out;
    out.reserve(static_cast<std::size_t>(runs));
    for (int r = 1; r <= runs; ++r) {
        RunResult res = prequential_run(cv_stream(stream, period, r), config, batch_size);
        res.run_id = std::to_string(r);
        out.push_back(std::move(res));
    }
    return out;
}

namespace {

// Studentized range q_{0.05} / sqrt(2) enters the Nemenyi CD; these are the
// published two-tailed constants for k = 2..20 at alpha = 0.05.
const double kNemenyiQ05[] = {
    0.0,   0.0,   1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102,
    3.164, 3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517,
    3.544,
};

std::vector<double> column_ranks(const std::vector<double>& values) {
    const auto k = values.size();
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    // Higher score -> better -> lower rank.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] > values[b];
    });
    std::vector<double> ranks(k, 0.0);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

FriedmanResult friedman_nemenyi(const std::vector<std::vector<double>>& scores) {
    const auto k = scores.size();
    if (k < 2) throw std::invalid_argument("need at least 2 approaches");
    const auto n = scores.front().size();
    if (n < 2) throw std::invalid_argument("need at least 2 datasets");
    for (const auto& row : scores) {
        if (row.size() != n) throw std::invalid_argument("ragged scores matrix");
    }

    FriedmanResult res;
    res.average_ranks.assign(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> col(k);
        for (std::size_t i = 0; i < k; ++i) col[i] = scores[i][j];
        const auto ranks = column_ranks(col);
        for (std::size_t i = 0; i < k; ++i) res.average_ranks[i] += ranks[i];
    }
    for (auto& r : res.average_ranks) r /= static_cast<double>(n);

    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    double sum_sq = 0.0;
    for (double r : res.average_ranks) sum_sq += r * r;
    res.chi_square = 12.0 * nd / (kd * (kd + 1.0)) * sum_sq - 3.0 * nd * (kd + 1.0);
    res.chi_square = std::max(res.chi_square, 0.0);

    boost::math::chi_squared dist(kd - 1.0);
    res.p_value = 1.0 - boost::math::cdf(dist, res.chi_square);

    const double q = k <= 20 ? kNemenyiQ05[k] : kNemenyiQ05[20];
    res.critical_difference = q * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));
    return res;
}

double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("unpaired samples");
    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) return 1.0;

    const auto n = diffs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::fabs(diffs[x]) < std::fabs(diffs[y]);
    });

    std::vector<double> ranks(n, 0.0);
    double tie_correction = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n &&
               std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]])) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        tie_correction += t * t * t - t;
        for (std::size_t s = i; s <= j; ++s) ranks[order[s]] = avg;
        i = j + 1;
    }

    double w_plus = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (diffs[s] > 0.0) w_plus += ranks[s];
    }
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_correction / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (w_plus - mean) / std::sqrt(var);
    return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

}  // namespace driftgmm
