#include "driftgmm/stream_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace driftgmm {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

}  // namespace

int ConceptSpec::n_classes() const {
    if (rule == Rule::CLUSTERS) return static_cast<int>(clusters.size());
    return 2;
}

int ConceptSpec::label_of(const Eigen::VectorXd& x) const {
    switch (rule) {
        case Rule::SINE1: {
            bool below = x[1] < std::sin(x[0]);
            return (below != reversed) ? 1 : 0;
        }
        case Rule::SINE2: {
            bool below = x[1] < 0.5 + 0.3 * std::sin(3.0 * kPi * x[0]);
            return (below != reversed) ? 1 : 0;
        }
        case Rule::SEA:
            return (x[0] + x[1] <= sea_threshold) ? 1 : 0;
        case Rule::CIRCLE: {
            double dx = x[0] - circle_center[0];
            double dy = x[1] - circle_center[1];
            return (dx * dx + dy * dy <= circle_radius * circle_radius) ? 1 : 0;
        }
        case Rule::CLUSTERS: {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                for (const auto& cl : clusters[c]) {
                    double d = (Eigen::Vector2d(x[0], x[1]) - cl.center).squaredNorm();
                    if (d < best_d) {
                        best_d = d;
                        best = static_cast<int>(c);
                    }
                }
            }
            return best;
        }
    }
    return 0;
}

ConceptSpec interpolate(const ConceptSpec& from, const ConceptSpec& to, double t) {
    ConceptSpec out = to;
    out.sea_threshold = from.sea_threshold + t * (to.sea_threshold - from.sea_threshold);
    out.circle_center = from.circle_center + t * (to.circle_center - from.circle_center);
    out.circle_radius = from.circle_radius + t * (to.circle_radius - from.circle_radius);
    return out;
}

std::vector<long> ConceptSchedule::boundaries() const {
    const auto n = static_cast<long>(concepts.size());
    std::vector<long> starts(n);
    for (long i = 0; i < n; ++i) {
        starts[i] = (static_cast<long>(total_examples) * i) / n;
    }
    return starts;
}

namespace {

class StreamSampler {
public:
    StreamSampler(const ConceptSchedule& schedule, std::mt19937_64& rng)
        : schedule_(schedule), rng_(rng),
          class_pick_(schedule.class_probs.begin(), schedule.class_probs.end()),
          unit_(0.0, 1.0) {}

    Observation sample(const ConceptSpec& spec, long t) {
        int target = class_pick_(rng_);
        Eigen::VectorXd x = spec.rule == ConceptSpec::Rule::CLUSTERS
                                ? sample_cluster(spec, target)
                                : sample_rule(spec, target);
        int label = spec.label_of(x);
        if (schedule_.noise_rate > 0.0 && unit_(rng_) < schedule_.noise_rate) {
            label = flip_label(label, schedule_.n_classes());
        }
        return Observation{std::move(x), label, t};
    }

    int flip_label(int label, int n_classes) {
        std::uniform_int_distribution<int> other(0, n_classes - 2);
        int pick = other(rng_);
        return pick >= label ? pick + 1 : pick;
    }

private:
    Eigen::VectorXd sample_rule(const ConceptSpec& spec, int& target) {
        Eigen::VectorXd x(spec.dim());
        for (int tries = 0; tries < 1000; ++tries) {
            for (int j = 0; j < spec.dim(); ++j) {
                x[j] = spec.box_lo[j] + unit_(rng_) * (spec.box_hi[j] - spec.box_lo[j]);
            }
            if (spec.label_of(x) == target) return x;
        }
        target = spec.label_of(x);  // degenerate rule; accept as-is
        return x;
    }

    Eigen::VectorXd sample_cluster(const ConceptSpec& spec, int target) {
        const auto& own = spec.clusters[static_cast<std::size_t>(target)];
        std::uniform_int_distribution<std::size_t> pick(0, own.size() - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int tries = 0; tries < 100; ++tries) {
            const auto& cl = own[pick(rng_)];
            Eigen::VectorXd x = vec2(cl.center[0] + cl.sigma * gauss(rng_),
                                     cl.center[1] + cl.sigma * gauss(rng_));
            if (spec.label_of(x) == target) return x;
        }
        const auto& cl = own.front();
        return vec2(cl.center[0], cl.center[1]);
    }

    const ConceptSchedule& schedule_;
    std::mt19937_64& rng_;
    std::discrete_distribution<int> class_pick_;
    std::uniform_real_distribution<double> unit_;
};

}  // namespace

std::vector<Observation> generate(const ConceptSchedule& schedule) {
    if (schedule.concepts.empty() || schedule.total_examples <= 0) {
        throw std::invalid_argument("invalid schedule");
    }
    std::mt19937_64 rng(schedule.seed);
    StreamSampler sampler(schedule, rng);
    const auto starts = schedule.boundaries();
    const auto n_concepts = static_cast<long>(schedule.concepts.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Observation> stream;
    stream.reserve(static_cast<std::size_t>(schedule.total_examples));
    long concept_idx = 0;
    for (long t = 0; t < schedule.total_examples; ++t) {
        while (concept_idx + 1 < n_concepts && t >= starts[concept_idx + 1]) {
            ++concept_idx;
        }
        ConceptSpec active = schedule.concepts[static_cast<std::size_t>(concept_idx)];
        switch (schedule.transition) {
            case TransitionKind::ABRUPT:
                break;
            case TransitionKind::GRADUAL: {
                // Ramp the probability of the new concept 0 -> 1 over the
                // gradual_width observations straddling each boundary.
                const long w = schedule.gradual_width;
                long boundary = -1;
                long lo_idx = concept_idx;
                if (concept_idx + 1 < n_concepts &&
                    t >= starts[concept_idx + 1] - w / 2) {
                    boundary = starts[concept_idx + 1];
                    lo_idx = concept_idx;
                } else if (concept_idx > 0 && t < starts[concept_idx] + w / 2) {
                    boundary = starts[concept_idx];
                    lo_idx = concept_idx - 1;
                }
                if (boundary >= 0) {
                    double p_new = static_cast<double>(t - (boundary - w / 2)) /
                                   static_cast<double>(w);
                    p_new = std::clamp(p_new, 0.0, 1.0);
                    active = unit(rng) < p_new
                                 ? schedule.concepts[static_cast<std::size_t>(lo_idx + 1)]
                                 : schedule.concepts[static_cast<std::size_t>(lo_idx)];
                }
                break;
            }
            case TransitionKind::INCREMENTAL: {
                if (concept_idx > 0) {
                    const long start = starts[concept_idx];
                    const long end = concept_idx + 1 < n_concepts
                                         ? starts[concept_idx + 1]
                                         : schedule.total_examples;
                    double alpha = static_cast<double>(t - start + 1) /
                                   static_cast<double>(end - start);
                    active = interpolate(
                        schedule.concepts[static_cast<std::size_t>(concept_idx - 1)],
                        schedule.concepts[static_cast<std::size_t>(concept_idx)], alpha);
                }
                break;
            }
        }
        stream.push_back(sampler.sample(active, t));
    }
    return stream;
}

namespace {

ConceptSpec sine_concept(ConceptSpec::Rule rule, bool reversed) {
    ConceptSpec c;
    c.rule = rule;
    c.reversed = reversed;
    c.box_lo = vec2(0.0, 0.0);
    c.box_hi = vec2(1.0, 1.0);
    return c;
}

ConceptSpec sea_concept(double threshold) {
    ConceptSpec c;
    c.rule = ConceptSpec::Rule::SEA;
    c.sea_threshold = threshold;
    c.box_lo = vec3(0.0, 0.0, 0.0);
    c.box_hi = vec3(10.0, 10.0, 10.0);
    return c;
}

ConceptSpec circle_concept(double cx, double cy, double r) {
    ConceptSpec c;
    c.rule = ConceptSpec::Rule::CIRCLE;
    c.circle_center = Eigen::Vector2d(cx, cy);
    c.circle_radius = r;
    c.box_lo = vec2(0.0, 0.0);
    c.box_hi = vec2(1.0, 1.0);
    return c;
}

// Cluster positions live on a 3-spaced grid in [0, 12]^2 so every pair of
// clusters stays at least 6 sigma apart.
struct ClusterAdd {
    int cls;
    double x;
    double y;
};

const std::vector<ClusterAdd> kVirtualAdds = {
    {0, 1.5, 7.5}, {1, 10.5, 10.5}, {2, 7.5, 4.5}, {0, 7.5, 10.5},
    {1, 4.5, 4.5}, {2, 10.5, 7.5},  {0, 1.5, 4.5}, {1, 7.5, 7.5},
};

ConceptSpec virtual_concept(int n_adds) {
    ConceptSpec c;
    c.rule = ConceptSpec::Rule::CLUSTERS;
    c.box_lo = vec2(0.0, 0.0);
    c.box_hi = vec2(12.0, 12.0);
    c.clusters = {
        {{Eigen::Vector2d(1.5, 1.5), 0.5}},
        {{Eigen::Vector2d(4.5, 10.5), 0.5}},
        {{Eigen::Vector2d(10.5, 1.5), 0.5}},
    };
    for (int i = 0; i < n_adds; ++i) {
        const auto& add = kVirtualAdds[static_cast<std::size_t>(i)];
        c.clusters[static_cast<std::size_t>(add.cls)].push_back(
            {Eigen::Vector2d(add.x, add.y), 0.5});
    }
    return c;
}

}  // namespace

ConceptSchedule builtin_schedule(const std::string& name) {
    std::string id = name;
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });

    ConceptSchedule s;
    s.name = id;
    if (id == "sine1" || id == "sine2") {
        const auto rule = id == "sine1" ? ConceptSpec::Rule::SINE1
                                        : ConceptSpec::Rule::SINE2;
        for (int i = 0; i < 5; ++i) s.concepts.push_back(sine_concept(rule, i % 2 == 1));
        s.concept_size = 2000;
        s.total_examples = 10000;
        s.transition = TransitionKind::ABRUPT;
        s.class_probs = {0.5, 0.5};
    } else if (id == "sea" || id == "searec") {
        const std::vector<double> thresholds = {8.0, 9.0, 7.0, 9.5};
        const int repeats = id == "sea" ? 1 : 2;
        for (int r = 0; r < repeats; ++r) {
            for (double th : thresholds) s.concepts.push_back(sea_concept(th));
        }
        s.concept_size = 2000;
        s.total_examples = 2000 * static_cast<int>(s.concepts.size());
        s.transition = TransitionKind::GRADUAL;
        s.gradual_width = 500;
        s.class_probs = {0.5, 0.5};
    } else if (id == "circles") {
        s.concepts = {
            circle_concept(0.2, 0.5, 0.15),
            circle_concept(0.4, 0.5, 0.20),
            circle_concept(0.6, 0.5, 0.25),
            circle_concept(0.8, 0.5, 0.30),
        };
        s.concept_size = 2000;
        s.total_examples = 8000;
        s.transition = TransitionKind::INCREMENTAL;
        s.class_probs = {0.5, 0.5};
    } else if (id == "virtual5") {
        for (int i = 0; i < 5; ++i) s.concepts.push_back(virtual_concept(i));
        s.concept_size = 2000;
        s.total_examples = 10000;
        s.transition = TransitionKind::ABRUPT;
        s.class_probs = {0.343, 0.355, 0.302};
    } else if (id == "virtual9") {
        for (int i = 0; i < 9; ++i) s.concepts.push_back(virtual_concept(i));
        s.concept_size = 1000;
        s.total_examples = 10000;
        s.transition = TransitionKind::ABRUPT;
        s.class_probs = {0.326, 0.352, 0.322};
    } else {
        throw std::invalid_argument("unknown dataset: " + name);
    }
    return s;
}

double severity(const ConceptSpec& a, const ConceptSpec& b,
                int n_samples, double noise_rate, std::uint64_t seed) {
    if (a.dim() != b.dim()) throw dimension_error("severity: dimension mismatch");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n_classes = std::max(a.n_classes(), b.n_classes());

    long changed = 0;
    for (int i = 0; i < n_samples; ++i) {
        Eigen::VectorXd x(a.dim());
        bool region_changed = false;
        if (a.rule == ConceptSpec::Rule::CLUSTERS) {
            // Mixture of both concepts' cluster samplers.
            const ConceptSpec& src = (i % 2 == 0) ? a : b;
            std::vector<const GaussianCluster*> all;
            for (const auto& cls : src.clusters)
                for (const auto& cl : cls) all.push_back(&cl);
            std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
            const auto* cl = all[pick(rng)];
            x = vec2(cl->center[0] + cl->sigma * gauss(rng),
                     cl->center[1] + cl->sigma * gauss(rng));
            // Regions with (numerically) zero density under a count as
            // changed. 5 sigma keeps a's own samples below the cutoff
            // (P ~ 4e-6) while flagging new clusters, which sit >= 6 sigma
            // from every old one on the grid.
            double min_dist = std::numeric_limits<double>::infinity();
            for (const auto& cls : a.clusters) {
                for (const auto& acl : cls) {
                    double d = (Eigen::Vector2d(x[0], x[1]) - acl.center).norm() / acl.sigma;
                    min_dist = std::min(min_dist, d);
                }
            }
            region_changed = min_dist > 5.0;
        } else {
            for (int j = 0; j < a.dim(); ++j) {
                double lo = std::min(a.box_lo[j], b.box_lo[j]);
                double hi = std::max(a.box_hi[j], b.box_hi[j]);
                x[j] = lo + unit(rng) * (hi - lo);
            }
        }
        int la = a.label_of(x);
        int lb = b.label_of(x);
        if (noise_rate > 0.0 && unit(rng) < noise_rate) {
            std::uniform_int_distribution<int> other(0, n_classes - 2);
            int p = other(rng);
            lb = p >= lb ? p + 1 : p;
        }
        if (region_changed || la != lb) ++changed;
    }
    return 100.0 * static_cast<double>(changed) / static_cast<double>(n_samples);
}

std::vector<double> schedule_severities(const ConceptSchedule& schedule,
                                        int n_samples, double noise_rate,
                                        std::uint64_t seed) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < schedule.concepts.size(); ++i) {
        out.push_back(severity(schedule.concepts[i], schedule.concepts[i + 1],
                               n_samples, noise_rate, seed + i));
    }
    return out;
}

void write_stream_csv(std::ostream& out, const std::vector<Observation>& stream) {
    if (stream.empty()) throw std::invalid_argument("empty stream");
    const auto d = stream.front().features.size();
    for (Eigen::Index j = 0; j < d; ++j) {
        out << 'a' << (j + 1) << ',';
    }
    out << "label\n";
    char buf[64];
    for (const auto& obs : stream) {
        for (Eigen::Index j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.10g", obs.features[j]);
            out << buf << ',';
        }
        out << obs.label << '\n';
    }
}

}  // namespace driftgmm
