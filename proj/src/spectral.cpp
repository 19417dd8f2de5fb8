#include "unionclust/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "unionclust/rng.hpp"

namespace unionclust {

namespace {

// Rethrows library exceptions with the pipeline stage prepended.
template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InvalidInputError& e) {
        throw InvalidInputError(std::string(stage) + ": " + e.what());
    } catch (const EstimationError& e) {
        throw EstimationError(std::string(stage) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(stage) + ": " + e.what());
    }
}

RealMatrix embedding_from_spectrum(const SpectrumResult& spectrum, Index L_hat) {
    RealMatrix embed = spectrum.eigenvectors.leftCols(L_hat);
    for (Index r = 0; r < embed.rows(); ++r) {
        const double n = embed.row(r).norm();
        if (n > 0.0) embed.row(r) /= n; // all-zero rows stay zero
    }
    return embed;
}

ClusteringResult cluster_from_spectrum(const SpectrumResult& spectrum, Index L_hat,
                                       OrderMode estimator_used,
                                       const SpectralConfig& cfg) {
    const RealMatrix embed = embedding_from_spectrum(spectrum, L_hat);
    const KMeansResult km = kmeans(embed, L_hat, cfg.kmeans_restarts,
                                   cfg.kmeans_max_iter, cfg.seed);
    ClusteringResult result;
    result.predicted_labels = km.labels;
    result.L_hat = L_hat;
    result.laplacian_eigenvalues = spectrum.eigenvalues;
    result.estimator_used = estimator_used;
    result.kmeans_inertia = km.inertia;
    return result;
}

} // namespace

const char* order_mode_name(OrderMode mode) {
    switch (mode) {
        case OrderMode::zero_count: return "zero_count";
        case OrderMode::eigengap: return "eigengap";
        case OrderMode::given_L: return "given_L";
    }
    return "unknown";
}

RealMatrix normalized_laplacian(const AffinityGraph& G) {
    const Index n = G.size();
    const RealMatrix& a = G.adjacency;
    RealVector dinv_sqrt(n);
    for (Index i = 0; i < n; ++i) {
        const double degree = a.row(i).sum();
        dinv_sqrt(i) = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
    }
    RealMatrix lap = -(dinv_sqrt.asDiagonal() * a * dinv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;
    return lap;
}

std::pair<Index, OrderMode> estimate_num_clusters(const RealVector& eigenvalues,
                                                  const SpectralConfig& cfg) {
    const Index n = eigenvalues.size();
    if (n == 0) throw InvalidInputError("estimate_num_clusters: empty spectrum");

    switch (cfg.order_mode) {
        case OrderMode::given_L: {
            if (cfg.given_L < 1) {
                throw InvalidInputError("estimate_num_clusters: given_L must be >= 1");
            }
            return {cfg.given_L, OrderMode::given_L};
        }
        case OrderMode::zero_count: {
            const double tol = cfg.scale_zero_tol_by_n
                                   ? cfg.zero_eig_tol * static_cast<double>(n)
                                   : cfg.zero_eig_tol;
            Index count = 0;
            for (Index i = 0; i < n; ++i) {
                if (eigenvalues(i) <= tol) ++count;
            }
            if (count == 0) {
                throw EstimationError(
                    "estimate_num_clusters: no eigenvalue at or below tolerance " +
                    std::to_string(tol) + "; consider the eigengap estimator");
            }
            return {count, OrderMode::zero_count};
        }
        case OrderMode::eigengap: {
            if (n < 2) {
                throw InvalidInputError(
                    "estimate_num_clusters: eigengap needs at least 2 eigenvalues");
            }
            const Index scan = cfg.max_L_scan > 0 ? cfg.max_L_scan
                                                  : std::min<Index>(n - 1, 30);
            if (scan < 2) {
                throw InvalidInputError("estimate_num_clusters: max_L_scan must be >= 2");
            }
            // candidate L = i has gap eigenvalues(i) - eigenvalues(i-1), 0-based
            const Index last = std::min<Index>(scan - 1, n - 1);
            Index best = 1;
            double best_gap = -1.0;
            for (Index i = 1; i <= last; ++i) {
                const double gap = eigenvalues(i) - eigenvalues(i - 1);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = i;
                }
            }
            return {best, OrderMode::eigengap};
        }
    }
    throw InvalidInputError("estimate_num_clusters: unknown order mode");
}

KMeansResult kmeans(const RealMatrix& points, Index k, Index restarts, Index max_iter,
                    std::uint64_t seed) {
    const Index n = points.rows();
    const Index dim = points.cols();
    if (n < 1) throw InvalidInputError("kmeans: no points");
    if (k < 1 || k > n) throw InvalidInputError("kmeans: k must be in [1, n]");
    if (restarts < 1) throw InvalidInputError("kmeans: restarts must be >= 1");
    if (max_iter < 1) throw InvalidInputError("kmeans: max_iter must be >= 1");
    require_finite(points, "kmeans points");

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    std::vector<int> labels(static_cast<std::size_t>(n));
    std::vector<Index> counts(static_cast<std::size_t>(k));

    for (Index restart = 0; restart < restarts; ++restart) {
        Rng rng(derive_seed(seed, "kmeans-restart", static_cast<std::uint64_t>(restart)));

        // Greedy farthest-point seeding: random first center, then repeatedly
        // the point farthest from its nearest chosen center (ties by index).
        RealMatrix centers(k, dim);
        centers.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
        RealVector min_dist2 =
            (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
        for (Index c = 1; c < k; ++c) {
            Index far = 0;
            double far_d = -1.0;
            for (Index i = 0; i < n; ++i) {
                if (min_dist2(i) > far_d) {
                    far_d = min_dist2(i);
                    far = i;
                }
            }
            centers.row(c) = points.row(far);
            min_dist2 = min_dist2.cwiseMin(
                (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
        }

        std::fill(labels.begin(), labels.end(), -1);
        Index iterations = 0;
        bool changed = true;
        while (changed && iterations < max_iter) {
            ++iterations;
            changed = false;

            // assignment, nearest center with ties to the lowest center index
            std::fill(counts.begin(), counts.end(), Index{0});
            for (Index i = 0; i < n; ++i) {
                int nearest = 0;
                double nearest_d = (points.row(i) - centers.row(0)).squaredNorm();
                for (Index c = 1; c < k; ++c) {
                    const double d2 = (points.row(i) - centers.row(c)).squaredNorm();
                    if (d2 < nearest_d) {
                        nearest_d = d2;
                        nearest = static_cast<int>(c);
                    }
                }
                if (labels[static_cast<std::size_t>(i)] != nearest) {
                    labels[static_cast<std::size_t>(i)] = nearest;
                    changed = true;
                }
                ++counts[static_cast<std::size_t>(nearest)];
            }

            // empty-cluster repair: hand each empty cluster the point farthest
            // from its current center, one cluster at a time
            for (Index c = 0; c < k; ++c) {
                if (counts[static_cast<std::size_t>(c)] > 0) continue;
                Index far = -1;
                double far_d = -1.0;
                for (Index i = 0; i < n; ++i) {
                    const int owner = labels[static_cast<std::size_t>(i)];
                    if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
                    const double d2 =
                        (points.row(i) - centers.row(owner)).squaredNorm();
                    if (d2 > far_d) {
                        far_d = d2;
                        far = i;
                    }
                }
                if (far < 0) continue; // fewer distinct points than clusters
                --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
                labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
                ++counts[static_cast<std::size_t>(c)];
                changed = true;
            }

            // update
            centers.setZero();
            for (Index i = 0; i < n; ++i) {
                centers.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
            }
            for (Index c = 0; c < k; ++c) {
                if (counts[static_cast<std::size_t>(c)] > 0) {
                    centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
                }
            }
        }

        double inertia = 0.0;
        for (Index i = 0; i < n; ++i) {
            inertia += (points.row(i) - centers.row(labels[static_cast<std::size_t>(i)]))
                           .squaredNorm();
        }
        if (inertia < best.inertia) {
            best.labels = labels;
            best.inertia = inertia;
            best.iterations = iterations;
        }
    }
    return best;
}

ClusteringResult spectral_embed_and_cluster(const AffinityGraph& G, Index L_hat,
                                            const SpectralConfig& cfg) {
    if (L_hat < 1 || L_hat > G.size()) {
        throw InvalidInputError("spectral_embed_and_cluster: L_hat must be in [1, N]");
    }
    const SpectrumResult spectrum = symmetric_eigen(normalized_laplacian(G));
    return cluster_from_spectrum(spectrum, L_hat, OrderMode::given_L, cfg);
}

PipelineResult run_spectral_backend(const Dataset& X,
                                    std::vector<NeighborhoodResult> results,
                                    const SpectralConfig& spec_cfg) {
    PipelineResult out;
    out.neighborhoods = std::move(results);
    with_stage("graph", [&] {
        out.graph = build_adjacency(out.neighborhoods, X.size());
        if (spec_cfg.edge_prune_threshold > 0.0) {
            out.graph = pruned(out.graph, spec_cfg.edge_prune_threshold);
        }
        return 0;
    });
    with_stage("spectral", [&] {
        const SpectrumResult spectrum = symmetric_eigen(normalized_laplacian(out.graph));
        const auto [L_hat, used] = estimate_num_clusters(spectrum.eigenvalues, spec_cfg);
        if (L_hat > X.size()) {
            throw EstimationError("estimated L exceeds the number of points");
        }
        out.clustering = cluster_from_spectrum(spectrum, L_hat, used, spec_cfg);
        return 0;
    });
    return out;
}

PipelineResult run_pipeline(const Dataset& X, const TscConfig& tsc_cfg,
                            const SpectralConfig& spec_cfg) {
    with_stage("input", [&] {
        if (X.size() < 2) throw InvalidInputError("need at least 2 points");
        for (Index c = 0; c < X.size(); ++c) {
            if (std::abs(X.points.col(c).norm() - 1.0) > 1e-6) {
                throw InvalidInputError("points must be unit-norm (column " +
                                        std::to_string(c) + " is not)");
            }
        }
        return 0;
    });
    std::vector<NeighborhoodResult> results;
    with_stage("neighbors", [&] {
        results = select_all_neighborhoods(X, tsc_cfg);
        return 0;
    });
    return run_spectral_backend(X, std::move(results), spec_cfg);
}

} // namespace unionclust
