#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unionclust/dataio.hpp"
#include "unionclust/eval.hpp"
#include "unionclust/spectral.hpp"

namespace unionclust {

enum class Algorithm { tsc_fixed, tsc_modified, ssc_omp };

const char* algorithm_name(Algorithm algo);

/// Experiment protocol: sweep n, run each selected algorithm on shared
/// per-trial datasets, record clustering errors.
struct ExperimentSpec {
    std::string experiment = "synth";
    std::vector<Algorithm> algorithms = {Algorithm::tsc_fixed, Algorithm::tsc_modified,
                                         Algorithm::ssc_omp};
    std::vector<Index> sweep_n;
    Index trials = 10;
    std::uint64_t base_seed = 1;

    // algorithm parameters
    Index q = 20;
    double tau = 0.45;
    Index omp_max_iters = 20;

    // spectral backend
    OrderMode order_mode = OrderMode::given_L;
    double zero_eig_tol = 1e-8;
    double edge_prune_threshold = 0.0;
    Index kmeans_restarts = 10;

    // synthetic geometry; the default noise variance (total E||e||^2, noise
    // norm ~ 0.3) is the value that reproduces the reference error curves
    Index m = 120;
    Index L = 8;
    Index d = 30;
    Index shared_dims = 10;
    double noise_var = 0.09;

    // digit experiment
    std::vector<int> digits = {0, 2, 4, 8};

    std::string out_dir = "results";
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings;
    std::string csv_path;
    std::string json_path;
};

/// Per-trial dataset seed; all algorithms in a trial share it, so they see
/// the same problem instance. Stable across runs and platforms.
std::uint64_t trial_seed(const ExperimentSpec& spec, Index n, Index trial);

/// Runs one algorithm on one dataset (truth labels required) and returns the
/// finished result row.
ResultRow run_algorithm_on_dataset(const ExperimentSpec& spec, Algorithm algo,
                                   const Dataset& data, Index n,
                                   std::uint64_t dataset_seed,
                                   std::vector<std::string>* warnings);

/// Synthetic sweep; writes `<experiment>_results.csv` and
/// `<experiment>_summary.json` under spec.out_dir. Trials run in parallel
/// (capped by UNIONCLUST_THREADS) with per-trial derived seeds; outputs are
/// byte-identical across runs.
ExperimentOutput run_synth_experiment(const ExperimentSpec& spec);

/// Digit-clustering sweep over IDX files.
ExperimentOutput run_mnist_experiment(const ExperimentSpec& spec,
                                      const std::string& images_path,
                                      const std::string& labels_path);

enum class KRule { fixed, three_log_n, n_minus_1 };

struct Lemma1Row {
    Index n = 0;
    Index d = 0;
    Index k = 0;
    Index trials = 0;
    double empirical_prob = 0.0;
};

/// Connectivity sweep over an (n, d) grid; emits `n,d,k,trials,empirical_prob`
/// rows to out_csv when non-empty.
std::vector<Lemma1Row> run_lemma1_sweep(const std::vector<Index>& ns,
                                        const std::vector<Index>& ds, KRule rule,
                                        Index fixed_k, Index trials, std::uint64_t seed,
                                        const std::string& out_csv);

} // namespace unionclust
