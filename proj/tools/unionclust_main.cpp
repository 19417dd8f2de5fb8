// Experiment CLI: synthetic and digit-clustering sweeps, graph-connectivity
// Monte Carlo, segmentation-guarantee checks, and single-dataset clustering.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unionclust/baselines.hpp"
#include "unionclust/dataio.hpp"
#include "unionclust/errors.hpp"
#include "unionclust/eval.hpp"
#include "unionclust/experiments.hpp"
#include "unionclust/spectral.hpp"

namespace uc = unionclust;
namespace fs = std::filesystem;

namespace {

std::vector<uc::Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<uc::Algorithm> algos;
    for (const std::string& name : names) {
        if (name == "tsc_fixed") {
            algos.push_back(uc::Algorithm::tsc_fixed);
        } else if (name == "tsc_modified") {
            algos.push_back(uc::Algorithm::tsc_modified);
        } else if (name == "ssc_omp") {
            algos.push_back(uc::Algorithm::ssc_omp);
        } else {
            throw uc::InvalidInputError("unknown algorithm '" + name + "'");
        }
    }
    return algos;
}

uc::OrderMode parse_order_mode(const std::string& estimate) {
    if (estimate.empty()) return uc::OrderMode::given_L;
    if (estimate == "zero") return uc::OrderMode::zero_count;
    if (estimate == "eigengap") return uc::OrderMode::eigengap;
    throw uc::InvalidInputError("unknown --estimate-L mode '" + estimate + "'");
}

void report_output(const uc::ExperimentOutput& output) {
    for (const std::string& w : output.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << output.csv_path << '\n';
    std::cout << "wrote " << output.json_path << '\n';
}

struct SweepOptions {
    std::vector<uc::Index> sweep_n;
    std::vector<std::string> algo_names;
    uc::Index trials = 10;
    std::uint64_t seed = 1;
    uc::Index q = 20;
    double tau = 0.45;
    uc::Index omp_iters = 20;
    std::string estimate;
    double prune = 0.0;
    uc::Index kmeans_restarts = 10;
    std::string out_dir = "results";
};

void add_sweep_options(CLI::App* cmd, SweepOptions& opt) {
    cmd->add_option("--n", opt.sweep_n, "points per cluster, one sweep value per entry");
    cmd->add_option("--algo", opt.algo_names,
                    "algorithms to run: tsc_fixed, tsc_modified, ssc_omp");
    cmd->add_option("--trials", opt.trials, "trials per sweep value");
    cmd->add_option("--seed", opt.seed, "base seed for all derived streams");
    cmd->add_option("--q", opt.q, "neighborhood size for tsc_fixed");
    cmd->add_option("--tau", opt.tau, "residual threshold for tsc_modified");
    cmd->add_option("--omp-iters", opt.omp_iters, "iteration cap for ssc_omp");
    cmd->add_option("--estimate-L", opt.estimate,
                    "estimate the cluster count: zero | eigengap (default: use true L)");
    cmd->add_option("--prune", opt.prune,
                    "drop adjacency entries at or below this weight before the Laplacian");
    cmd->add_option("--kmeans-restarts", opt.kmeans_restarts, "seeded k-means restarts");
    cmd->add_option("--out", opt.out_dir, "output directory");
}

uc::ExperimentSpec to_spec(const SweepOptions& opt, const std::string& experiment) {
    uc::ExperimentSpec spec;
    spec.experiment = experiment;
    if (!opt.algo_names.empty()) spec.algorithms = parse_algorithms(opt.algo_names);
    spec.sweep_n = opt.sweep_n;
    spec.trials = opt.trials;
    spec.base_seed = opt.seed;
    spec.q = opt.q;
    spec.tau = opt.tau;
    spec.omp_max_iters = opt.omp_iters;
    spec.order_mode = parse_order_mode(opt.estimate);
    spec.edge_prune_threshold = opt.prune;
    spec.kmeans_restarts = opt.kmeans_restarts;
    spec.out_dir = opt.out_dir;
    return spec;
}

int run_app(int argc, char** argv) {
    CLI::App app{"subspace clustering experiments (TSC, modified TSC, SSC-OMP)"};
    app.require_subcommand(1);

    // ---- synth ----
    SweepOptions synth_opt;
    uc::Index synth_m = 120, synth_L = 8, synth_d = 30, synth_p = 10;
    double synth_sigma2 = 0.09;
    CLI::App* synth = app.add_subcommand("synth", "synthetic union-of-subspaces sweep");
    add_sweep_options(synth, synth_opt);
    synth->add_option("--m", synth_m, "ambient dimension");
    synth->add_option("--L", synth_L, "number of subspaces");
    synth->add_option("--d", synth_d, "subspace dimension");
    synth->add_option("--p", synth_p, "shared leading dimensions");
    synth->add_option("--sigma2", synth_sigma2,
                      "total noise variance E||e||^2 (default reproduces the "
                      "reference curves, noise norm ~ 0.3)");
    synth->callback([&] {
        if (synth_opt.sweep_n.empty()) synth_opt.sweep_n = {30, 60, 105};
        uc::ExperimentSpec spec = to_spec(synth_opt, "synth");
        spec.m = synth_m;
        spec.L = synth_L;
        spec.d = synth_d;
        spec.shared_dims = synth_p;
        spec.noise_var = synth_sigma2;
        report_output(uc::run_synth_experiment(spec));
    });

    // ---- mnist ----
    SweepOptions mnist_opt;
    mnist_opt.q = 7;
    mnist_opt.omp_iters = 7;
    std::string mnist_images, mnist_labels;
    std::vector<int> mnist_digits;
    CLI::App* mnist = app.add_subcommand("mnist", "handwritten-digit clustering sweep");
    add_sweep_options(mnist, mnist_opt);
    mnist->add_option("--mnist-images", mnist_images, "IDX image file")->required();
    mnist->add_option("--mnist-labels", mnist_labels, "IDX label file")->required();
    mnist->add_option("--digits", mnist_digits, "digits to cluster (default 0 2 4 8)");
    mnist->callback([&] {
        if (mnist_opt.sweep_n.empty()) mnist_opt.sweep_n = {250};
        uc::ExperimentSpec spec = to_spec(mnist_opt, "mnist");
        if (!mnist_digits.empty()) spec.digits = mnist_digits;
        report_output(uc::run_mnist_experiment(spec, mnist_images, mnist_labels));
    });

    // ---- lemma1 ----
    std::vector<uc::Index> l1_n{200}, l1_d{5};
    std::string l1_rule = "3logn";
    uc::Index l1_k = 0, l1_trials = 200;
    std::uint64_t l1_seed = 1;
    std::string l1_out = "results";
    CLI::App* lemma1 = app.add_subcommand(
        "lemma1", "Monte Carlo connectivity of spherical kNN graphs");
    lemma1->add_option("--n", l1_n, "numbers of points");
    lemma1->add_option("--d", l1_d, "sphere dimensions (each > 1)");
    lemma1->add_option("--k-rule", l1_rule, "k rule: 3logn | nminus1 | fixed");
    lemma1->add_option("--k", l1_k, "k when --k-rule fixed");
    lemma1->add_option("--trials", l1_trials, "Monte Carlo trials per grid point");
    lemma1->add_option("--seed", l1_seed, "base seed");
    lemma1->add_option("--out", l1_out, "output directory");
    lemma1->callback([&] {
        uc::KRule rule;
        if (l1_rule == "3logn") {
            rule = uc::KRule::three_log_n;
        } else if (l1_rule == "nminus1") {
            rule = uc::KRule::n_minus_1;
        } else if (l1_rule == "fixed") {
            rule = uc::KRule::fixed;
            if (l1_k < 1) throw uc::InvalidInputError("--k must be >= 1 with --k-rule fixed");
        } else {
            throw uc::InvalidInputError("unknown --k-rule '" + l1_rule + "'");
        }
        fs::create_directories(l1_out);
        const std::string csv = (fs::path(l1_out) / "lemma1_connectivity.csv").string();
        const auto grid = uc::run_lemma1_sweep(l1_n, l1_d, rule, l1_k, l1_trials, l1_seed, csv);
        for (const auto& row : grid) {
            std::cout << "n=" << row.n << " d=" << row.d << " k=" << row.k
                      << " P(connected)=" << row.empirical_prob << '\n';
        }
        std::cout << "wrote " << csv << '\n';
    });

    // ---- check ----
    uc::Index chk_m = 120, chk_L = 8, chk_d = 30, chk_p = 10, chk_n = 50;
    std::vector<uc::Index> chk_n_per;
    std::vector<std::string> chk_bases;
    double chk_c2 = 1.0, chk_ratio = 6.0;
    std::uint64_t chk_seed = 1;
    std::string chk_out;
    CLI::App* check = app.add_subcommand(
        "check", "report the exact-segmentation guarantee's hypotheses");
    check->add_option("--m", chk_m, "ambient dimension");
    check->add_option("--L", chk_L, "number of subspaces");
    check->add_option("--d", chk_d, "subspace dimension");
    check->add_option("--p", chk_p, "shared leading dimensions");
    check->add_option("--n", chk_n, "points per subspace");
    check->add_option("--n-per", chk_n_per, "per-subspace point counts (overrides --n)");
    check->add_option("--basis", chk_bases,
                      "headerless CSV basis matrix, one per subspace (overrides synth config)");
    check->add_option("--c2", chk_c2, "constant in d_l >= c2 log n_l");
    check->add_option("--ratio", chk_ratio, "required n_l / d_l");
    check->add_option("--seed", chk_seed, "seed for the synthetic model");
    check->add_option("--out", chk_out, "also write the JSON report here");
    check->callback([&] {
        uc::SubspaceModel model;
        if (!chk_bases.empty()) {
            for (const std::string& path : chk_bases) {
                uc::RealMatrix basis = uc::read_matrix_csv(path);
                if (model.bases.empty()) {
                    model.ambient_dim = basis.rows();
                } else if (basis.rows() != model.ambient_dim) {
                    throw uc::InvalidInputError("basis files disagree on the ambient dimension");
                }
                model.dims.push_back(basis.cols());
                model.bases.push_back(std::move(basis));
            }
        } else {
            uc::SynthConfig cfg;
            cfg.m = chk_m;
            cfg.L = chk_L;
            cfg.d = chk_d;
            cfg.shared_dims = chk_p;
            cfg.seed = chk_seed;
            model = uc::make_subspaces(cfg);
        }
        std::vector<uc::Index> n_per = chk_n_per;
        if (n_per.empty()) {
            n_per.assign(static_cast<std::size_t>(model.num_subspaces()), chk_n);
        }
        uc::TheoremCheckConfig cfg;
        cfg.c2 = chk_c2;
        cfg.min_points_ratio = chk_ratio;
        const std::string json = uc::theorem_report_to_json(
            uc::theorem_check(model, n_per, cfg));
        std::cout << json << '\n';
        if (!chk_out.empty()) {
            std::ofstream out(chk_out);
            if (!out) throw uc::IoError("cannot open " + chk_out);
            out << json << '\n';
        }
    });

    // ---- cluster ----
    std::string cl_input, cl_algo = "tsc_modified", cl_estimate;
    uc::Index cl_q = 0, cl_iters = 20, cl_L = 0, cl_restarts = 10;
    double cl_tau = 0.45, cl_prune = 0.0;
    std::uint64_t cl_seed = 1;
    std::string cl_out = "results";
    CLI::App* cluster = app.add_subcommand("cluster", "cluster one dataset file");
    cluster->add_option("--input", cl_input, "dataset file (.csv or .bin)")->required();
    cluster->add_option("--algo", cl_algo, "tsc_fixed | tsc_modified | ssc_omp");
    cluster->add_option("--q", cl_q, "neighborhood size (tsc_fixed)");
    cluster->add_option("--tau", cl_tau, "residual threshold (tsc_modified)");
    cluster->add_option("--omp-iters", cl_iters, "iteration cap (ssc_omp)");
    cluster->add_option("--L", cl_L, "use this cluster count instead of estimating");
    cluster->add_option("--estimate-L", cl_estimate, "zero | eigengap (default zero)");
    cluster->add_option("--seed", cl_seed, "seed for k-means");
    cluster->add_option("--prune", cl_prune,
                        "drop adjacency entries at or below this weight before the Laplacian");
    cluster->add_option("--kmeans-restarts", cl_restarts, "seeded k-means restarts");
    cluster->add_option("--out", cl_out, "output directory");
    cluster->callback([&] {
        if (cl_L > 0 && !cl_estimate.empty()) {
            throw uc::InvalidInputError("--L and --estimate-L are mutually exclusive");
        }
        uc::Dataset data = cl_input.size() > 4 && cl_input.ends_with(".bin")
                               ? uc::read_dataset_binary(cl_input)
                               : uc::read_dataset_csv(cl_input);
        uc::normalize_columns(data.points);

        uc::SpectralConfig spec_cfg;
        if (cl_L > 0) {
            spec_cfg.order_mode = uc::OrderMode::given_L;
            spec_cfg.given_L = cl_L;
        } else if (cl_estimate.empty() || cl_estimate == "zero") {
            spec_cfg.order_mode = uc::OrderMode::zero_count;
        } else {
            spec_cfg.order_mode = parse_order_mode(cl_estimate);
        }
        spec_cfg.edge_prune_threshold = cl_prune;
        spec_cfg.kmeans_restarts = cl_restarts;
        spec_cfg.seed = cl_seed;

        uc::PipelineResult result;
        if (cl_algo == "ssc_omp") {
            uc::OmpConfig omp;
            omp.max_iters = std::min(cl_iters, data.size() - 1);
            result = uc::run_spectral_backend(data, uc::omp_represent_all(data, omp),
                                              spec_cfg);
        } else if (cl_algo == "tsc_fixed" || cl_algo == "tsc_modified") {
            uc::TscConfig tsc;
            if (cl_algo == "tsc_fixed") {
                if (cl_q < 1) throw uc::InvalidInputError("--q is required for tsc_fixed");
                tsc.mode = uc::TscMode::fixed_q;
                tsc.q = std::min(cl_q, data.size() - 1);
            } else {
                tsc.mode = uc::TscMode::modified;
                tsc.tau = cl_tau;
            }
            result = uc::run_pipeline(data, tsc, spec_cfg);
        } else {
            throw uc::InvalidInputError("unknown algorithm '" + cl_algo + "'");
        }

        fs::create_directories(cl_out);
        const std::string labels_path = (fs::path(cl_out) / "labels.csv").string();
        std::ofstream labels_out(labels_path);
        if (!labels_out) throw uc::IoError("cannot open " + labels_path);
        labels_out << "index,label\n";
        for (std::size_t i = 0; i < result.clustering.predicted_labels.size(); ++i) {
            labels_out << i << ',' << result.clustering.predicted_labels[i] << '\n';
        }

        nlohmann::json summary;
        summary["algorithm"] = cl_algo;
        summary["L_hat"] = result.clustering.L_hat;
        summary["estimator_used"] = uc::order_mode_name(result.clustering.estimator_used);
        summary["kmeans_inertia"] = result.clustering.kmeans_inertia;
        const uc::Index head =
            std::min<uc::Index>(result.clustering.laplacian_eigenvalues.size(), 12);
        std::vector<double> eigs(static_cast<std::size_t>(head));
        for (uc::Index i = 0; i < head; ++i) {
            eigs[static_cast<std::size_t>(i)] = result.clustering.laplacian_eigenvalues(i);
        }
        summary["laplacian_eigenvalues_head"] = eigs;
        if (data.labels) {
            summary["clustering_error"] =
                uc::clustering_error(result.clustering.predicted_labels, *data.labels);
        }
        const std::string summary_path = (fs::path(cl_out) / "cluster_summary.json").string();
        std::ofstream summary_out(summary_path);
        if (!summary_out) throw uc::IoError("cannot open " + summary_path);
        summary_out << summary.dump(2) << '\n';
        std::cout << summary.dump(2) << '\n';
        std::cout << "wrote " << labels_path << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors exit 2, --help exits 0
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const uc::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const uc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const uc::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const uc::EstimationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const uc::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
