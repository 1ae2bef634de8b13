// Command-line front end: synthetic dataset generation, prequential
// experiment execution (with ablations, noise sweeps and cross-validation),
// statistical comparison of result files, and decision-boundary exports.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "driftgmm/csv.hpp"
#include "driftgmm/eval.hpp"
#include "driftgmm/stream_gen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace driftgmm;

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("DRIFTGMM_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<long>(n, cap);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Runs `fn(i)` for i in [0, jobs) on a bounded pool, rethrowing the first error.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = worker_count(jobs);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

const char* level_name(DriftLevel level) {
    switch (level) {
        case DriftLevel::NORMAL: return "normal";
        case DriftLevel::WARNING: return "warning";
        case DriftLevel::DRIFT: return "drift";
    }
    return "?";
}

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::BOOTSTRAP: return "bootstrap";
        case Phase::ONLINE: return "online";
        case Phase::COLLECTING: return "collecting";
    }
    return "?";
}

struct DatasetSource {
    std::string id;
    bool builtin = false;
    std::string name_or_path;
};

DatasetSource resolve_dataset(const std::string& spec) {
    DatasetSource src;
    src.name_or_path = spec;
    try {
        builtin_schedule(spec);
        src.builtin = true;
        src.id = spec;
    } catch (const std::invalid_argument&) {
        src.builtin = false;
        src.id = fs::path(spec).stem().string();
    }
    return src;
}

std::vector<Observation> load_dataset(const DatasetSource& src, std::uint64_t seed,
                                      double noise, int* dim_out) {
    std::vector<Observation> stream;
    if (src.builtin) {
        auto schedule = builtin_schedule(src.name_or_path);
        schedule.seed = seed;
        schedule.noise_rate = noise;
        stream = generate(schedule);
    } else {
        if (noise > 0.0) {
            throw std::invalid_argument("--noise requires a built-in dataset");
        }
        auto loaded = load_stream_csv(src.name_or_path);
        if (loaded.rejected_rows > 0) {
            std::cerr << "note: rejected " << loaded.rejected_rows
                      << " unparsable rows from " << src.name_or_path << "\n";
        }
        stream = std::move(loaded.observations);
    }
    if (stream.empty()) throw std::runtime_error("dataset is empty");
    if (dim_out) *dim_out = static_cast<int>(stream.front().features.size());
    return stream;
}

AblationFlags parse_ablations(const std::vector<std::string>& names) {
    AblationFlags flags;
    for (const auto& n : names) {
        if (n == "non-severe") flags.non_severe = true;
        else if (n == "severe") flags.severe = true;
        else if (n == "pool") flags.pool = true;
        else if (n == "filter") flags.filter = true;
        else throw std::invalid_argument("unknown ablation: " + n);
    }
    return flags;
}

std::string ablation_id(const AblationFlags& f) {
    std::string id;
    if (f.non_severe) id += "-no-non-severe";
    if (f.severe) id += "-no-severe";
    if (f.pool) id += "-no-pool";
    if (f.filter) id += "-no-filter";
    return id.empty() ? "full" : id.substr(1);
}

// ---------------------------------------------------------------- generate

int cmd_generate(const std::string& dataset, std::uint64_t seed, double noise,
                 std::string out) {
    auto schedule = builtin_schedule(dataset);
    schedule.seed = seed;
    schedule.noise_rate = noise;
    auto stream = generate(schedule);

    if (out.empty()) out = schedule.name + ".csv";
    std::ostringstream csv;
    write_stream_csv(csv, stream);
    atomic_write(out, csv.str());

    // Severity is measured the way the published table does: 2000 samples
    // per drift with 10% label noise.
    auto severities = schedule_severities(schedule, 2000, 0.10, seed);
    json meta;
    meta["dataset"] = schedule.name;
    meta["seed"] = seed;
    meta["noise_rate"] = noise;
    meta["examples"] = schedule.total_examples;
    meta["attributes"] = schedule.dim();
    meta["classes"] = schedule.n_classes();
    meta["concepts"] = schedule.concepts.size();
    meta["concept_size"] = schedule.concept_size;
    meta["concept_starts"] = schedule.boundaries();
    meta["class_probs"] = schedule.class_probs;
    meta["severity_noise_rate"] = 0.10;
    meta["severities"] = severities;
    atomic_write(fs::path(out).replace_extension(".meta.json"), meta.dump(2) + "\n");

    std::cout << "wrote " << out << " (" << stream.size() << " rows) and sidecar\n";
    return 0;
}

// --------------------------------------------------------------------- run

struct RunJob {
    std::string run_id;
    std::string config_id;
    double noise = 0.0;
    int cv_run = 0;  // 0 = full stream
    LearnerConfig config;
};

void write_results_csv(const fs::path& path, const std::vector<RunResult>& results) {
    std::ostringstream out;
    out << "run_id,dataset_id,config_id,accuracy,gmean,runtime_seconds\n";
    for (const auto& r : results) {
        out << r.run_id << ',' << r.dataset_id << ',' << r.config_id << ','
            << format_double(r.overall_accuracy) << ',' << format_double(r.gmean)
            << ',' << format_double(r.runtime_seconds) << '\n';
    }
    atomic_write(path, out.str());
}

void write_aot_csv(const fs::path& path, const std::vector<RunResult>& results) {
    std::ostringstream out;
    out << "run_id,dataset_id,config_id,batch,accuracy\n";
    for (const auto& r : results) {
        for (const auto& [batch, acc] : r.aot) {
            out << r.run_id << ',' << r.dataset_id << ',' << r.config_id << ','
                << batch << ',' << format_double(acc) << '\n';
        }
    }
    atomic_write(path, out.str());
}

void write_events_csv(const fs::path& path, const std::vector<RunResult>& results) {
    std::ostringstream out;
    out << "run_id,timestamp,prediction,true_label,error,level,gaussians,pool_size,"
           "phase,rejected\n";
    for (const auto& r : results) {
        for (const auto& e : r.events) {
            out << r.run_id << ',' << e.timestamp << ',' << e.prediction << ','
                << e.true_label << ',' << (e.error ? 1 : 0) << ','
                << level_name(e.level) << ',' << e.gaussian_count << ','
                << e.pool_size << ',' << phase_name(e.phase) << ','
                << (e.rejected ? 1 : 0) << '\n';
        }
    }
    atomic_write(path, out.str());
}

int cmd_run(const std::string& dataset, const LearnerConfig& base, bool m_explicit,
            const std::vector<std::string>& ablate, std::vector<double> noise_levels,
            int cv_runs, int cv_period, int batch_size, const std::string& out_dir,
            bool dump_events) {
    const auto src = resolve_dataset(dataset);
    const AblationFlags flags = parse_ablations(ablate);
    if (noise_levels.empty()) noise_levels.push_back(src.builtin ? 0.0 : -1.0);
    for (double n : noise_levels) {
        if (src.builtin && (n < 0.0 || n >= 1.0)) {
            throw std::invalid_argument("noise levels must lie in [0, 1)");
        }
    }

    std::vector<RunJob> jobs;
    for (double noise : noise_levels) {
        LearnerConfig cfg = ablation_config(base, flags);
        std::string config_id = ablation_id(flags);
        if (src.builtin) config_id += "-n" + format_double(noise);
        if (cv_runs > 0) {
            for (int r = 1; r <= cv_runs; ++r) {
                jobs.push_back({std::to_string(r), config_id, noise, r, cfg});
            }
        } else {
            jobs.push_back({"1", config_id, noise, 0, cfg});
        }
    }

    // Streams per noise level are shared across cv runs.
    std::map<double, std::vector<Observation>> streams;
    int dim = 0;
    for (double noise : noise_levels) {
        streams[noise] = load_dataset(src, base.seed, std::max(noise, 0.0), &dim);
    }
    // Default m: 50 for small synthetic attribute counts, 200 otherwise.
    LearnerConfig resolved = base;
    if (!m_explicit) resolved.m = dim <= 3 ? 50 : 200;
    for (auto& job : jobs) job.config.m = resolved.m;

    std::vector<RunResult> results(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const RunJob& job = jobs[i];
        const auto& stream = streams.at(job.noise);
        RunResult r = job.cv_run > 0
                          ? prequential_run(cv_stream(stream, cv_period, job.cv_run),
                                            job.config, batch_size)
                          : prequential_run(stream, job.config, batch_size);
        r.run_id = job.run_id;
        r.dataset_id = src.id;
        r.config_id = job.config_id;
        results[i] = std::move(r);
    });

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_results_csv(dir / "results.csv", results);
    write_aot_csv(dir / "aot.csv", results);
    if (dump_events) write_events_csv(dir / "events.csv", results);

    for (const auto& r : results) {
        std::cout << r.dataset_id << ' ' << r.config_id << " run " << r.run_id
                  << ": accuracy " << format_double(r.overall_accuracy) << ", gmean "
                  << format_double(r.gmean) << '\n';
    }
    std::cout << "wrote " << (dir / "results.csv").string() << '\n';
    return 0;
}

// ------------------------------------------------------------------- stats

struct ResultRow {
    std::string run_id, dataset_id, config_id;
    double accuracy = 0.0;
};

std::vector<ResultRow> read_results(const std::vector<std::string>& files) {
    std::vector<ResultRow> rows;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot read " + file);
        std::string line;
        if (!std::getline(in, line)) continue;  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            ResultRow row;
            std::string acc, rest;
            if (!std::getline(ss, row.run_id, ',') ||
                !std::getline(ss, row.dataset_id, ',') ||
                !std::getline(ss, row.config_id, ',') || !std::getline(ss, acc, ',')) {
                throw std::runtime_error("malformed result row in " + file + ": " + line);
            }
            row.accuracy = std::stod(acc);
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) throw std::runtime_error("no result rows found");
    return rows;
}

int cmd_stats(const std::vector<std::string>& files, const std::string& out_file) {
    auto rows = read_results(files);

    std::set<std::string> approaches, datasets;
    for (const auto& r : rows) {
        approaches.insert(r.config_id);
        datasets.insert(r.dataset_id);
    }
    // Mean accuracy per (approach, dataset).
    std::map<std::pair<std::string, std::string>, std::pair<double, long>> sums;
    for (const auto& r : rows) {
        auto& [sum, count] = sums[{r.config_id, r.dataset_id}];
        sum += r.accuracy;
        ++count;
    }

    std::ostringstream report;
    report << "approaches: " << approaches.size() << ", datasets: " << datasets.size()
           << ", rows: " << rows.size() << "\n\n";
    report << "mean accuracy per approach x dataset\n";
    for (const auto& a : approaches) {
        for (const auto& d : datasets) {
            auto it = sums.find({a, d});
            if (it == sums.end()) {
                throw std::runtime_error("approach " + a + " has no rows for dataset " + d);
            }
            report << "  " << a << " / " << d << ": "
                   << format_double(it->second.first / it->second.second) << '\n';
        }
    }

    if (approaches.size() >= 2 && datasets.size() >= 2) {
        std::vector<std::vector<double>> scores;
        for (const auto& a : approaches) {
            std::vector<double> row;
            for (const auto& d : datasets) {
                const auto& [sum, count] = sums.at({a, d});
                row.push_back(sum / count);
            }
            scores.push_back(std::move(row));
        }
        auto fr = friedman_nemenyi(scores);
        report << "\nFriedman chi-square " << format_double(fr.chi_square)
               << ", p-value " << format_double(fr.p_value)
               << ", Nemenyi CD " << format_double(fr.critical_difference) << '\n';
        std::size_t i = 0;
        for (const auto& a : approaches) {
            report << "  rank " << format_double(fr.average_ranks[i++]) << "  " << a << '\n';
        }
    }

    if (approaches.size() == 2) {
        // Pair runs by (dataset, run id) for the signed-rank test.
        const std::string& a0 = *approaches.begin();
        const std::string& a1 = *std::next(approaches.begin());
        std::map<std::pair<std::string, std::string>, std::pair<double, double>> paired;
        std::map<std::pair<std::string, std::string>, std::pair<bool, bool>> seen;
        for (const auto& r : rows) {
            auto key = std::make_pair(r.dataset_id, r.run_id);
            if (r.config_id == a0) {
                paired[key].first = r.accuracy;
                seen[key].first = true;
            } else {
                paired[key].second = r.accuracy;
                seen[key].second = true;
            }
        }
        std::vector<double> xs, ys;
        for (const auto& [key, flags] : seen) {
            if (flags.first && flags.second) {
                xs.push_back(paired[key].first);
                ys.push_back(paired[key].second);
            }
        }
        if (xs.size() >= 2) {
            report << "\nWilcoxon signed-rank (" << a0 << " vs " << a1 << ", "
                   << xs.size() << " pairs): p = "
                   << format_double(wilcoxon_signed_rank(xs, ys)) << '\n';
        }
    }

    if (out_file.empty()) {
        std::cout << report.str();
    } else {
        atomic_write(out_file, report.str());
        std::cout << "wrote " << out_file << '\n';
    }
    return 0;
}

// ----------------------------------------------------------- boundary-grid

int cmd_boundary_grid(const std::string& dataset, std::uint64_t seed, double noise,
                      long at, int resolution, const LearnerConfig& base,
                      bool m_explicit, const std::string& out) {
    auto schedule = builtin_schedule(dataset);
    if (schedule.dim() != 2) {
        throw std::invalid_argument("boundary-grid requires a 2-attribute dataset");
    }
    schedule.seed = seed;
    schedule.noise_rate = noise;
    auto stream = generate(schedule);
    if (at < 0 || at > static_cast<long>(stream.size())) {
        throw std::invalid_argument("timestamp outside the stream");
    }

    LearnerConfig cfg = base;
    if (!m_explicit) cfg.m = 50;
    Learner learner(cfg);
    for (long t = 0; t < at; ++t) {
        learner.process(stream[static_cast<std::size_t>(t)].features,
                        stream[static_cast<std::size_t>(t)].label);
    }
    if (learner.phase() == Phase::BOOTSTRAP) {
        throw std::runtime_error("learner still bootstrapping at t=" + std::to_string(at));
    }

    const auto& spec = schedule.concepts.front();
    std::ostringstream csv;
    csv << "x1,x2,prediction\n";
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            Eigen::VectorXd x(2);
            x[0] = spec.box_lo[0] + (i + 0.5) * (spec.box_hi[0] - spec.box_lo[0]) /
                                        resolution;
            x[1] = spec.box_lo[1] + (j + 0.5) * (spec.box_hi[1] - spec.box_lo[1]) /
                                        resolution;
            csv << format_double(x[0]) << ',' << format_double(x[1]) << ','
                << predict(learner.model(), x) << '\n';
        }
    }
    atomic_write(out, csv.str());
    std::cout << "wrote " << out << " (" << resolution * resolution << " cells)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming Gaussian-mixture drift classifier"};
    app.require_subcommand(1);

    LearnerConfig base;
    bool m_explicit = false;

    auto add_learner_flags = [&](CLI::App* cmd) {
        cmd->add_option("--m", base.m, "training window size")
            ->check(CLI::PositiveNumber)
            ->each([&](const std::string&) { m_explicit = true; });
        cmd->add_option("--kmax", base.kmax, "max Gaussians per class");
        cmd->add_option("--em-iterations", base.em_iterations, "EM iterations");
        cmd->add_option("--radius-divisor", base.radius_divisor, "creation radius divisor");
        cmd->add_option("--pool-capacity", base.pool_capacity, "model pool capacity");
        cmd->add_option("--kdn-k", base.kdn_k, "kDN neighbor count");
        cmd->add_option("--kdn-threshold", base.kdn_threshold, "kDN noise threshold");
        cmd->add_option("--alpha", base.detector.alpha, "detector warning threshold");
        cmd->add_option("--beta", base.detector.beta, "detector drift threshold");
        cmd->add_option("--c-scale", base.detector.c_scale, "drift sensitivity scale");
        cmd->add_option("--seed", base.seed, "random seed");
    };

    // generate
    auto* gen = app.add_subcommand("generate", "materialize a built-in dataset as CSV");
    std::string gen_dataset, gen_out;
    std::uint64_t gen_seed = 42;
    double gen_noise = 0.0;
    gen->add_option("dataset", gen_dataset, "built-in dataset name")->required();
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--noise", gen_noise, "label noise rate")->check(CLI::Range(0.0, 0.999));
    gen->add_option("--out", gen_out, "output CSV path");

    // run
    auto* run = app.add_subcommand("run", "prequential experiment");
    run->set_config("--config", "", "key = value config file (flags override)");
    std::string run_dataset, run_out = ".";
    std::vector<std::string> run_ablate;
    std::vector<double> run_noise;
    int run_cv = 0, run_cv_period = 30, run_batch = 500;
    bool run_events = false;
    run->add_option("--dataset", run_dataset, "built-in name or CSV path")->required();
    run->add_option("--ablate", run_ablate,
                    "mechanisms to disable: non-severe severe pool filter");
    run->add_option("--noise", run_noise, "noise levels to sweep (built-ins only)");
    run->add_option("--cv", run_cv, "stream cross-validation run count");
    run->add_option("--cv-period", run_cv_period, "cross-validation period X");
    run->add_option("--batch-size", run_batch, "AOT batch size");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--events", run_events, "also write the per-observation event log");
    add_learner_flags(run);

    // stats
    auto* stats = app.add_subcommand("stats", "aggregate result CSVs");
    std::vector<std::string> stats_files;
    std::string stats_out;
    stats->add_option("results", stats_files, "results.csv files")->required();
    stats->add_option("--out", stats_out, "write the report to a file");

    // boundary-grid
    auto* grid = app.add_subcommand("boundary-grid", "decision boundary as CSV");
    std::string grid_dataset, grid_out = "boundary.csv";
    std::uint64_t grid_seed = 42;
    double grid_noise = 0.0;
    long grid_at = 0;
    int grid_resolution = 100;
    grid->add_option("--dataset", grid_dataset, "built-in 2-attribute dataset")->required();
    grid->add_option("--at", grid_at, "observations to process before the snapshot")
        ->required();
    grid->add_option("--resolution", grid_resolution, "grid cells per axis")
        ->check(CLI::PositiveNumber);
    grid->add_option("--noise", grid_noise, "label noise rate");
    grid->add_option("--out", grid_out, "output CSV path");
    grid->add_option("--grid-seed", grid_seed, "stream seed");
    add_learner_flags(grid);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_dataset, gen_seed, gen_noise, gen_out);
        if (run->parsed()) {
            return cmd_run(run_dataset, base, m_explicit, run_ablate, run_noise, run_cv,
                           run_cv_period, run_batch, run_out, run_events);
        }
        if (stats->parsed()) return cmd_stats(stats_files, stats_out);
        if (grid->parsed()) {
            return cmd_boundary_grid(grid_dataset, grid_seed, grid_noise, grid_at,
                                     grid_resolution, base, m_explicit, grid_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
