#include <doctest.h>

#include <algorithm>
#include <random>

#include "driftgmm/noise_filter.hpp"
#include "helpers.hpp"

using namespace driftgmm;
using testutil::vec;

namespace {

std::vector<Observation> line_set(std::initializer_list<std::pair<double, int>> pts) {
    std::vector<Observation> out;
    long t = 0;
    for (auto [x, y] : pts) out.push_back({vec({x}), y, t++});
    return out;
}

/// All-pairs reference implementation of kDN, including the one-duplicate
/// exclusion, written against the definition rather than the library code.
double kdn_oracle(const Eigen::VectorXd& x, int y,
                  const std::vector<Observation>& ref, int k) {
    struct Cand {
        double dist2;
        std::size_t index;
        int label;
    };
    std::vector<Cand> cands;
    bool skipped_self = false;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (!skipped_self && ref[i].label == y && ref[i].features == x) {
            skipped_self = true;
            continue;
        }
        cands.push_back({(ref[i].features - x).squaredNorm(), i, ref[i].label});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
    });
    const std::size_t use = std::min<std::size_t>(static_cast<std::size_t>(k), cands.size());
    if (use == 0) return 0.0;
    long disagree = 0;
    for (std::size_t i = 0; i < use; ++i)
        if (cands[i].label != y) ++disagree;
    return static_cast<double>(disagree) / static_cast<double>(use);
}

}  // namespace

TEST_CASE("kdn on unanimous neighborhoods") {
    auto same = line_set({{0.1, 0}, {0.2, 0}, {0.3, 0}, {0.4, 0}, {0.5, 0}, {9.0, 1}});
    CHECK(kdn(vec({0.0}), 0, same, 5) == 0.0);

    auto other = line_set({{0.1, 1}, {0.2, 1}, {0.3, 1}, {0.4, 1}, {0.5, 1}, {9.0, 0}});
    CHECK(kdn(vec({0.0}), 0, other, 5) == 1.0);

    auto mixed = line_set({{0.1, 1}, {0.2, 1}, {0.3, 0}, {0.4, 1}, {0.5, 1}, {9.0, 0}});
    CHECK(kdn(vec({0.0}), 0, mixed, 5) == doctest::Approx(0.8));
}

TEST_CASE("kdn uses all entries when fewer than k") {
    auto tiny = line_set({{0.1, 1}, {0.2, 0}});
    CHECK(kdn(vec({0.0}), 0, tiny, 5) == doctest::Approx(0.5));
}

TEST_CASE("kdn excludes exactly one duplicate of the query") {
    // The query itself sits in the set; its own entry must not count as a
    // neighbor, but a second identical point must.
    auto s = line_set({{0.0, 0}, {0.0, 0}, {1.0, 1}, {2.0, 1}});
    CHECK(kdn(vec({0.0}), 0, s, 3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("kdn matches the all-pairs oracle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int size = 6 + static_cast<int>(rng() % 195);
        std::vector<Observation> ref;
        for (int i = 0; i < size; ++i)
            ref.push_back({testutil::random_vec(d, rng), static_cast<int>(rng() % 3),
                           static_cast<long>(i)});
        const int k = 1 + static_cast<int>(rng() % 7);
        // Half the queries are members of the set (duplicate-exclusion path).
        Eigen::VectorXd x;
        int y;
        if (trial % 2 == 0) {
            const auto& pick = ref[rng() % ref.size()];
            x = pick.features;
            y = pick.label;
        } else {
            x = testutil::random_vec(d, rng);
            y = static_cast<int>(rng() % 3);
        }
        const double got = kdn(x, y, ref, k);
        CHECK(got == doctest::Approx(kdn_oracle(x, y, ref, k)).epsilon(1e-12));
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("filter keeps noise-free separable blobs intact") {
    std::mt19937_64 rng(3);
    auto t = testutil::two_blobs(30, 20.0, rng);
    auto filtered = filter_training_set(t);
    CHECK(filtered.size() == t.size());
}

TEST_CASE("filter removes exactly a flipped point deep in the other class") {
    std::mt19937_64 rng(4);
    auto t = testutil::two_blobs(30, 20.0, rng);
    t.push_back({vec({20.0, 20.0}), 0, 60});  // class-0 label inside the class-1 blob
    auto filtered = filter_training_set(t);
    CHECK(filtered.size() == t.size() - 1);
    for (const auto& obs : filtered) {
        CHECK_FALSE((obs.label == 0 && obs.features[0] > 10.0));
    }
}

TEST_CASE("threshold 1.0 never removes anything") {
    std::mt19937_64 rng(5);
    auto t = testutil::two_blobs(10, 0.1, rng);  // heavily overlapping
    auto filtered = filter_training_set(t, 5, 1.0);
    CHECK(filtered.size() == t.size());
}

TEST_CASE("filter is idempotent on its own output") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto t = testutil::two_blobs(40, 3.0, rng);
        // Flip 20% of the labels.
        for (auto& obs : t)
            if (rng() % 5 == 0) obs.label = 1 - obs.label;
        auto once = filter_training_set(t);
        auto twice = filter_training_set(once);
        REQUIRE(twice.size() == once.size());
        for (std::size_t i = 0; i < once.size(); ++i) {
            CHECK(twice[i].label == once[i].label);
            CHECK(twice[i].features == once[i].features);
        }
    }
}

TEST_CASE("filter never empties a class") {
    // A tiny class drowned in the other class: all its points are flagged,
    // but the lowest-kDN ones are retained and reported.
    std::mt19937_64 rng(8);
    auto t = testutil::two_blobs(30, 0.0, rng, 2, 0.3);  // same location, both classes
    t.resize(33);                                        // 30 of class 0, 3 of class 1
    int protected_count = 0;
    auto filtered = filter_training_set(t, 5, 0.8, &protected_count);
    bool has_class1 = false;
    for (const auto& obs : filtered) has_class1 |= (obs.label == 1);
    CHECK(has_class1);
    CHECK(protected_count > 0);
}

TEST_CASE("validation window evicts strictly FIFO") {
    ValidationWindow w(3);
    for (int i = 0; i < 5; ++i) {
        w.push({vec({static_cast<double>(i)}), i, i});
        CHECK(w.size() <= 3);
    }
    auto snap = w.snapshot();
    REQUIRE(snap.size() == 3);
    CHECK(snap[0].label == 2);
    CHECK(snap[1].label == 3);
    CHECK(snap[2].label == 4);
}

TEST_CASE("is_noisy verdicts on unanimous windows") {
    ValidationWindow w(50);
    for (int i = 0; i < 10; ++i) w.push({vec({0.1 * i}), 0, i});
    CHECK_FALSE(is_noisy(w, vec({0.5}), 0));
    CHECK(is_noisy(w, vec({0.5}), 1));
    CHECK(w.size() == 12);  // both probes were inserted
}

TEST_CASE("repeated arrivals in a new region flip the verdict") {
    ValidationWindow w(100);
    for (int i = 0; i < 20; ++i) w.push({vec({0.01 * i}), 0, i});

    // A drifted region: class-1 points around x = 10. The first arrivals are
    // rejected; once same-class evidence accumulates the gate opens.
    bool saw_noisy = false;
    bool saw_clean = false;
    for (int i = 0; i < 10; ++i) {
        const bool verdict = is_noisy(w, vec({10.0 + 0.01 * i}), 1);
        if (i == 0) CHECK(verdict);
        if (verdict)
            saw_noisy = true;
        else {
            saw_clean = true;
            CHECK(saw_noisy);  // noisy first, clean only after evidence
        }
    }
    CHECK(saw_noisy);
    CHECK(saw_clean);
}
