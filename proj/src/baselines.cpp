#include "unionclust/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "unionclust/parallel.hpp"

namespace unionclust {

NeighborhoodResult omp_represent(const Dataset& X, Index j, const OmpConfig& cfg) {
    const Index n = X.size();
    if (n < 2) throw InvalidInputError("omp_represent: need at least 2 points");
    if (j < 0 || j >= n) throw InvalidInputError("omp_represent: point index out of range");
    if (cfg.max_iters < 1) throw InvalidInputError("omp_represent: max_iters must be >= 1");
    if (cfg.residual_tol < 0) throw InvalidInputError("omp_represent: negative residual_tol");
    require_finite(X.points, "omp_represent points");

    const Index budget = std::min(cfg.max_iters, n - 1);
    const RealVector x = X.points.col(j);

    NeighborhoodResult result;
    result.point_index = j;
    result.residual_trace.reserve(static_cast<std::size_t>(budget));

    GrowingBasis basis(X.ambient_dim());
    RealVector residual = x;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    used[static_cast<std::size_t>(j)] = 1;

    while (static_cast<Index>(result.selected.size()) < budget) {
        const RealVector corr = X.points.transpose() * residual;
        Index pick = -1;
        double pick_corr = -1.0;
        for (Index i = 0; i < n; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            const double c = std::abs(corr(i));
            if (c > pick_corr) {
                pick_corr = c;
                pick = i;
            }
        }
        used[static_cast<std::size_t>(pick)] = 1;
        result.selected.push_back(pick);
        if (basis.try_add(X.points.col(pick))) {
            const RealVector newest = basis.last_column();
            residual -= newest * newest.dot(residual);
        }
        result.residual_trace.push_back(residual.norm());
        if (result.residual_trace.back() <= cfg.residual_tol) break;
    }

    result.q_j = static_cast<Index>(result.selected.size());
    result.truncated = result.residual_trace.back() > cfg.residual_tol;

    RealMatrix selected_cols(X.ambient_dim(), result.q_j);
    for (Index i = 0; i < result.q_j; ++i) {
        selected_cols.col(i) = X.points.col(result.selected[static_cast<std::size_t>(i)]);
    }
    result.coefficients = pseudo_inverse(selected_cols) * x;
    return result;
}

std::vector<NeighborhoodResult> omp_represent_all(const Dataset& X, const OmpConfig& cfg) {
    if (X.size() < 2) throw InvalidInputError("omp_represent_all: need at least 2 points");
    std::vector<NeighborhoodResult> results(static_cast<std::size_t>(X.size()));
    parallel_for(results.size(), [&](std::size_t j) {
        results[j] = omp_represent(X, static_cast<Index>(j), cfg);
    });
    return results;
}

} // namespace unionclust
