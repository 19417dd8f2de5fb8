#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "unionclust/graph.hpp"
#include "unionclust/neighbors.hpp"

namespace unionclust {

enum class OrderMode { zero_count, eigengap, given_L };

const char* order_mode_name(OrderMode mode);

struct SpectralConfig {
    OrderMode order_mode = OrderMode::zero_count;
    Index given_L = 0;
    double zero_eig_tol = 1e-8;
    bool scale_zero_tol_by_n = false;  // guard: Laplacian rounding grows with N
    Index max_L_scan = 0;              // 0 = min(N-1, 30)
    double edge_prune_threshold = 0.0; // drop adjacency entries at or below this
    Index kmeans_restarts = 10;
    Index kmeans_max_iter = 300;
    std::uint64_t seed = 0;
};

struct ClusteringResult {
    std::vector<int> predicted_labels;
    Index L_hat = 0;
    RealVector laplacian_eigenvalues; // ascending
    OrderMode estimator_used = OrderMode::given_L;
    double kmeans_inertia = 0.0;
};

/// L_sym = I - D^{-1/2} A D^{-1/2}. Zero-degree nodes contribute an identity
/// row/column (their D^{-1/2} entry is taken as 0, so the diagonal stays 1).
RealMatrix normalized_laplacian(const AffinityGraph& G);

/// Model-order estimate from the ascending Laplacian spectrum.
/// zero_count: number of eigenvalues at or below zero_eig_tol (an estimate of
/// 0 is an EstimationError suggesting eigengap mode). eigengap: position of
/// the largest gap within the scan bound. given_L: pass-through.
std::pair<Index, OrderMode> estimate_num_clusters(const RealVector& eigenvalues,
                                                  const SpectralConfig& cfg);

struct KMeansResult {
    std::vector<int> labels;
    double inertia = 0.0;
    Index iterations = 0;
};

/// Lloyd k-means over the rows of `points` with greedy farthest-point
/// seeding, `restarts` independent seeded starts, and empty-cluster repair by
/// reassigning the farthest point. Lowest inertia wins, ties by restart
/// index. Deterministic per seed.
KMeansResult kmeans(const RealMatrix& points, Index k, Index restarts,
                    Index max_iter, std::uint64_t seed);

/// Embeds the L_hat smallest eigenvectors of L_sym, row-normalizes the
/// embedding (all-zero rows stay zero), and runs k-means with k = L_hat.
ClusteringResult spectral_embed_and_cluster(const AffinityGraph& G, Index L_hat,
                                            const SpectralConfig& cfg);

struct PipelineResult {
    ClusteringResult clustering;
    AffinityGraph graph;
    std::vector<NeighborhoodResult> neighborhoods;
};

/// Backend shared by every algorithm: adjacency assembly from per-point
/// representations, model-order estimation, spectral embedding, k-means.
PipelineResult run_spectral_backend(const Dataset& X,
                                    std::vector<NeighborhoodResult> results,
                                    const SpectralConfig& spec_cfg);

/// Full modified/fixed-q TSC pipeline: neighborhood selection, adjacency,
/// model-order estimation, spectral clustering. Errors are annotated with
/// the stage that raised them.
PipelineResult run_pipeline(const Dataset& X, const TscConfig& tsc_cfg,
                            const SpectralConfig& spec_cfg);

} // namespace unionclust
