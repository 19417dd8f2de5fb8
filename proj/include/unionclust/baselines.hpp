#pragma once

#include <vector>

#include "unionclust/datagen.hpp"
#include "unionclust/neighbors.hpp"

namespace unionclust {

struct OmpConfig {
    Index max_iters = 20;
    double residual_tol = 1e-6;
};

/// Standard orthogonal matching pursuit of x_j against all other points:
/// repeatedly select the unused index maximizing |<r, x_i>| (ties by
/// ascending index), refit by least squares on the selected columns, update
/// the residual. Stops when |selected| == max_iters or ||r|| <= residual_tol.
/// Returned in NeighborhoodResult form; residual_trace holds per-iteration
/// residual norms and `truncated` is set when the iteration budget stopped
/// the pursuit before the residual tolerance was met.
NeighborhoodResult omp_represent(const Dataset& X, Index j, const OmpConfig& cfg);

/// omp_represent for every point, parallel across points; results identical
/// to a sequential run.
std::vector<NeighborhoodResult> omp_represent_all(const Dataset& X, const OmpConfig& cfg);

} // namespace unionclust
