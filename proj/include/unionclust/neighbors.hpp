#pragma once

#include <vector>

#include "unionclust/datagen.hpp"
#include "unionclust/numerics.hpp"

namespace unionclust {

enum class TscMode { modified, fixed_q };

struct TscConfig {
    TscMode mode = TscMode::modified;
    double tau = 0.0;       // modified mode: residual threshold
    Index q = 0;            // fixed mode: neighborhood size
    Index q_max = 0;        // scan bound; 0 = min(ambient_dim, N-1)
    double zero_tol = 1e-9; // residuals at or below this count as zero
};

/// Per-point neighborhood selection outcome. `selected` lists the q_j
/// nearest neighbors (nearest first) and `coefficients` holds the entries of
/// pinv(X_S) x_j aligned with it. `residual_trace[q-1]` is the distance from
/// x_j to the span of its q nearest neighbors.
struct NeighborhoodResult {
    Index point_index = 0;
    std::vector<Index> selected;
    Index q_j = 0;
    RealVector coefficients;
    std::vector<double> residual_trace;
    bool truncated = false; // modified mode hit q_max before reaching tau
};

/// Indices [N] \ {j} ordered by descending |<x_j, x_i>| — equivalently by
/// ascending pseudo-distance acos|<x_j, x_i>| — with ties broken by
/// ascending index.
std::vector<Index> rank_neighbors(const Dataset& X, Index j);

/// Neighborhood selection for one point. Modified mode scans
/// q = 1, 2, ... growing an orthonormal basis one neighbor at a time and
/// stops at the first q whose residual is at or below max(tau, zero_tol);
/// when no q <= q_max qualifies it returns q_max with `truncated` set.
/// Fixed-q mode returns the q nearest neighbors directly.
NeighborhoodResult select_neighborhood(const Dataset& X, Index j, const TscConfig& cfg);

/// select_neighborhood for every point, parallel across points; results are
/// identical to a sequential run.
std::vector<NeighborhoodResult> select_all_neighborhoods(const Dataset& X,
                                                         const TscConfig& cfg);

} // namespace unionclust
