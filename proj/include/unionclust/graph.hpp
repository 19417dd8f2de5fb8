#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unionclust/neighbors.hpp"
#include "unionclust/numerics.hpp"

namespace unionclust {

/// Symmetric nonnegative adjacency with zero diagonal, built as Z + Z^T.
struct AffinityGraph {
    RealMatrix adjacency;

    Index size() const { return adjacency.rows(); }
};

/// Connected-component labeling; ids are contiguous from 0 and ordered by
/// each component's smallest node index.
struct ComponentLabeling {
    std::vector<int> component_id;
    int component_count = 0;
};

/// Ground-truth graph diagnostics: cross-cluster edges and per-cluster
/// internal connectivity.
struct DiagnosticsReport {
    Index false_connection_count = 0;
    std::vector<bool> per_cluster_connected;
    bool exact_component_match = false;
};

/// Assembles Z column-wise from |coefficients| at the selected indices and
/// returns A = Z + Z^T with the diagonal forced to zero.
AffinityGraph build_adjacency(const std::vector<NeighborhoodResult>& results, Index N);

/// Copy of G with entries at or below threshold removed.
AffinityGraph pruned(const AffinityGraph& G, double threshold);

/// BFS labeling over edges A_ij > 0.
ComponentLabeling connected_components(const AffinityGraph& G);

/// false_connection_count = unordered pairs with an edge across different
/// truth labels; per_cluster_connected[l] = whether the subgraph induced on
/// cluster l is connected; exact_component_match = no false connections and
/// every cluster connected.
DiagnosticsReport diagnostics(const AffinityGraph& G, const std::vector<int>& truth);

/// Monte Carlo connectivity of the symmetric k-nearest-neighbor graph of n
/// i.i.d. uniform points on S^{d-1} under the pseudo-distance
/// acos|<a_i, a_j>|. Returns the fraction of connected trials; deterministic
/// per seed. Requires d > 1 and 1 <= k <= n-1.
double lemma1_connectivity(Index n, Index d, Index k, Index trials, std::uint64_t seed);

/// Edge-list export, one `i,j,weight` row per upper-triangle edge.
void write_edge_list_csv(const AffinityGraph& G, const std::string& path);

} // namespace unionclust
