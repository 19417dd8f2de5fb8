#include "unionclust/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>

#include <json.hpp>

#include "unionclust/baselines.hpp"
#include "unionclust/parallel.hpp"
#include "unionclust/rng.hpp"

namespace unionclust {

namespace {

struct TrialJob {
    Index n = 0;
    Index trial = 0;
    std::size_t row_offset = 0; // first row slot for this job's results
};

void validate_spec(const ExperimentSpec& spec) {
    if (spec.sweep_n.empty()) throw InvalidInputError("experiment: empty n sweep");
    for (Index n : spec.sweep_n) {
        if (n < 1) throw InvalidInputError("experiment: sweep values must be >= 1");
    }
    if (spec.trials < 1) throw InvalidInputError("experiment: trials must be >= 1");
    if (spec.algorithms.empty()) throw InvalidInputError("experiment: no algorithms selected");
    if (spec.order_mode == OrderMode::given_L && spec.experiment == "synth" && spec.L < 1) {
        throw InvalidInputError("experiment: L must be >= 1");
    }
}

SpectralConfig spectral_config(const ExperimentSpec& spec, Index true_L,
                               std::uint64_t kmeans_seed) {
    SpectralConfig cfg;
    cfg.order_mode = spec.order_mode;
    cfg.given_L = true_L;
    cfg.zero_eig_tol = spec.zero_eig_tol;
    cfg.edge_prune_threshold = spec.edge_prune_threshold;
    cfg.kmeans_restarts = spec.kmeans_restarts;
    cfg.seed = kmeans_seed;
    return cfg;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

nlohmann::json summarize(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
                         const std::vector<std::string>& warnings) {
    nlohmann::json summary;
    summary["experiment"] = spec.experiment;
    nlohmann::json config;
    config["trials"] = spec.trials;
    config["base_seed"] = spec.base_seed;
    config["q"] = spec.q;
    config["tau"] = spec.tau;
    config["omp_max_iters"] = spec.omp_max_iters;
    config["order_mode"] = order_mode_name(spec.order_mode);
    config["kmeans_restarts"] = spec.kmeans_restarts;
    if (spec.experiment == "synth") {
        config["m"] = spec.m;
        config["L"] = spec.L;
        config["d"] = spec.d;
        config["shared_dims"] = spec.shared_dims;
        config["noise_var"] = spec.noise_var;
    } else {
        config["digits"] = spec.digits;
    }
    summary["config"] = config;

    nlohmann::json results = nlohmann::json::array();
    for (Algorithm algo : spec.algorithms) {
        for (Index n : spec.sweep_n) {
            std::vector<double> errors;
            for (const ResultRow& row : rows) {
                if (row.algorithm == algorithm_name(algo) && row.n == n) {
                    errors.push_back(row.error);
                }
            }
            if (errors.empty()) continue;
            const double mean = mean_of(errors);
            nlohmann::json entry;
            entry["algorithm"] = algorithm_name(algo);
            entry["n"] = n;
            entry["trials"] = errors.size();
            entry["mean_error"] = mean;
            entry["std_error"] = stddev_of(errors, mean);
            results.push_back(entry);
        }
    }
    summary["results"] = results;

    nlohmann::json trial_rows = nlohmann::json::array();
    for (const ResultRow& row : rows) {
        nlohmann::json r;
        r["experiment"] = row.experiment;
        r["algorithm"] = row.algorithm;
        r["n"] = row.n;
        r["trial_seed"] = row.trial_seed;
        r["error"] = row.error;
        r["q_param"] = row.q_param;
        r["tau"] = row.tau;
        r["L_hat"] = row.L_hat;
        trial_rows.push_back(r);
    }
    summary["rows"] = trial_rows;
    summary["warnings"] = warnings;
    return summary;
}

ExperimentOutput finish(const ExperimentSpec& spec, std::vector<ResultRow> rows,
                        std::vector<std::string> warnings) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    ExperimentOutput out;
    out.rows = std::move(rows);
    out.warnings = std::move(warnings);
    out.csv_path = (fs::path(spec.out_dir) / (spec.experiment + "_results.csv")).string();
    out.json_path = (fs::path(spec.out_dir) / (spec.experiment + "_summary.json")).string();
    write_results_csv(out.rows, out.csv_path);
    std::ofstream json_out(out.json_path);
    if (!json_out) throw IoError("cannot open " + out.json_path);
    json_out << summarize(spec, out.rows, out.warnings).dump(2) << '\n';
    return out;
}

// Shared sweep driver: `make_data` produces the per-trial dataset.
template <typename MakeData>
ExperimentOutput run_sweep(const ExperimentSpec& spec, MakeData&& make_data) {
    validate_spec(spec);

    std::vector<TrialJob> jobs;
    const std::size_t algos = spec.algorithms.size();
    for (Index n : spec.sweep_n) {
        for (Index t = 0; t < spec.trials; ++t) {
            jobs.push_back({n, t, jobs.size() * algos});
        }
    }

    std::vector<ResultRow> rows(jobs.size() * algos);
    std::vector<std::string> warnings;
    std::mutex warnings_mutex;

    parallel_for(jobs.size(), [&](std::size_t idx) {
        const TrialJob& job = jobs[idx];
        const std::uint64_t seed = trial_seed(spec, job.n, job.trial);
        const Dataset data = make_data(job.n, seed);
        std::vector<std::string> local = data.warnings;
        for (std::size_t a = 0; a < algos; ++a) {
            rows[job.row_offset + a] = run_algorithm_on_dataset(
                spec, spec.algorithms[a], data, job.n, seed, &local);
        }
        if (!local.empty()) {
            std::lock_guard<std::mutex> lock(warnings_mutex);
            for (auto& w : local) {
                if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) {
                    warnings.push_back(w);
                }
            }
        }
    });

    std::sort(warnings.begin(), warnings.end());
    return finish(spec, std::move(rows), std::move(warnings));
}

} // namespace

const char* algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::tsc_fixed: return "tsc_fixed";
        case Algorithm::tsc_modified: return "tsc_modified";
        case Algorithm::ssc_omp: return "ssc_omp";
    }
    return "unknown";
}

std::uint64_t trial_seed(const ExperimentSpec& spec, Index n, Index trial) {
    return derive_seed(spec.base_seed,
                       {fnv1a64(spec.experiment), static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(trial)});
}

ResultRow run_algorithm_on_dataset(const ExperimentSpec& spec, Algorithm algo,
                                   const Dataset& data, Index n,
                                   std::uint64_t dataset_seed,
                                   std::vector<std::string>* warnings) {
    if (!data.labels) {
        throw InvalidInputError("run_algorithm_on_dataset: dataset has no ground truth");
    }
    const Index true_L = static_cast<Index>(data.per_cluster_counts.size());
    const std::uint64_t kmeans_seed = derive_seed(dataset_seed, algorithm_name(algo));
    const SpectralConfig spec_cfg = spectral_config(spec, true_L, kmeans_seed);

    ResultRow row;
    row.experiment = spec.experiment;
    row.algorithm = algorithm_name(algo);
    row.n = n;
    row.trial_seed = dataset_seed;

    PipelineResult result;
    switch (algo) {
        case Algorithm::tsc_fixed: {
            TscConfig tsc;
            tsc.mode = TscMode::fixed_q;
            tsc.q = spec.q;
            if (tsc.q > data.size() - 1) {
                if (warnings != nullptr) {
                    warnings->push_back("tsc_fixed: q=" + std::to_string(spec.q) +
                                        " clamped to N-1=" + std::to_string(data.size() - 1) +
                                        " at n=" + std::to_string(n));
                }
                tsc.q = data.size() - 1;
            }
            row.q_param = tsc.q;
            result = run_pipeline(data, tsc, spec_cfg);
            break;
        }
        case Algorithm::tsc_modified: {
            TscConfig tsc;
            tsc.mode = TscMode::modified;
            tsc.tau = spec.tau;
            row.tau = spec.tau;
            result = run_pipeline(data, tsc, spec_cfg);
            break;
        }
        case Algorithm::ssc_omp: {
            OmpConfig omp;
            omp.max_iters = std::min(spec.omp_max_iters, data.size() - 1);
            if (omp.max_iters < spec.omp_max_iters && warnings != nullptr) {
                warnings->push_back("ssc_omp: max_iters clamped to N-1=" +
                                    std::to_string(omp.max_iters) +
                                    " at n=" + std::to_string(n));
            }
            row.q_param = omp.max_iters;
            result = run_spectral_backend(data, omp_represent_all(data, omp), spec_cfg);
            break;
        }
    }

    row.error = clustering_error(result.clustering.predicted_labels, *data.labels);
    row.L_hat = result.clustering.L_hat;
    return row;
}

ExperimentOutput run_synth_experiment(const ExperimentSpec& spec) {
    if (spec.L < 1 || spec.d < 1) throw InvalidInputError("run_synth_experiment: bad geometry");
    return run_sweep(spec, [&](Index n, std::uint64_t seed) {
        SynthConfig cfg;
        cfg.m = spec.m;
        cfg.L = spec.L;
        cfg.d = spec.d;
        cfg.shared_dims = spec.shared_dims;
        cfg.n_per_subspace = n;
        cfg.noise_var = spec.noise_var;
        cfg.seed = seed;
        return synth_instance(cfg);
    });
}

ExperimentOutput run_mnist_experiment(const ExperimentSpec& spec,
                                      const std::string& images_path,
                                      const std::string& labels_path) {
    const MnistSet set = load_mnist(images_path, labels_path);
    return run_sweep(spec, [&](Index n, std::uint64_t seed) {
        return sample_digit_subset(set, spec.digits, n, seed);
    });
}

std::vector<Lemma1Row> run_lemma1_sweep(const std::vector<Index>& ns,
                                        const std::vector<Index>& ds, KRule rule,
                                        Index fixed_k, Index trials, std::uint64_t seed,
                                        const std::string& out_csv) {
    if (ns.empty() || ds.empty()) throw InvalidInputError("run_lemma1_sweep: empty grid");
    std::vector<Lemma1Row> grid;
    for (Index n : ns) {
        for (Index d : ds) {
            Index k = 0;
            switch (rule) {
                case KRule::fixed: k = fixed_k; break;
                case KRule::three_log_n:
                    k = static_cast<Index>(std::ceil(3.0 * std::log(static_cast<double>(n))));
                    break;
                case KRule::n_minus_1: k = n - 1; break;
            }
            k = std::clamp<Index>(k, 1, n - 1);
            grid.push_back({n, d, k, trials, 0.0});
        }
    }

    parallel_for(grid.size(), [&](std::size_t i) {
        Lemma1Row& row = grid[i];
        row.empirical_prob = lemma1_connectivity(
            row.n, row.d, row.k, row.trials,
            derive_seed(seed, "lemma1-sweep", static_cast<std::uint64_t>(row.n),
                        static_cast<std::uint64_t>(row.d)));
    });

    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        if (!out) throw IoError("run_lemma1_sweep: cannot open " + out_csv);
        out << "n,d,k,trials,empirical_prob\n";
        char buf[40];
        for (const Lemma1Row& row : grid) {
            std::snprintf(buf, sizeof(buf), "%.17g", row.empirical_prob);
            out << row.n << ',' << row.d << ',' << row.k << ',' << row.trials << ','
                << buf << '\n';
        }
        if (!out) throw IoError("run_lemma1_sweep: write failed for " + out_csv);
    }
    return grid;
}

} // namespace unionclust
