#include "unionclust/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "unionclust/parallel.hpp"

namespace unionclust {

namespace {

void validate_point_index(const Dataset& X, Index j, const char* what) {
    if (X.size() < 2) {
        throw InvalidInputError(std::string(what) + ": need at least 2 points");
    }
    if (j < 0 || j >= X.size()) {
        throw InvalidInputError(std::string(what) + ": point index out of range");
    }
}

// Indices != j sorted by descending correlation magnitude, ties by ascending
// index.
std::vector<Index> rank_from_correlations(const RealVector& corr, Index j) {
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(corr.size()) - 1);
    for (Index i = 0; i < corr.size(); ++i) {
        if (i != j) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ca = std::abs(corr(a)), cb = std::abs(corr(b));
        if (ca != cb) return ca > cb;
        return a < b;
    });
    return order;
}

Index effective_q_max(const Dataset& X, const TscConfig& cfg) {
    const Index hard = X.size() - 1;
    if (cfg.q_max > 0) return std::min(cfg.q_max, hard);
    return std::min(X.ambient_dim(), hard);
}

NeighborhoodResult select_impl(const Dataset& X, Index j, const TscConfig& cfg,
                               const RealVector& corr) {
    if (cfg.zero_tol < 0) throw InvalidInputError("select_neighborhood: negative zero_tol");

    const std::vector<Index> ranked = rank_from_correlations(corr, j);
    NeighborhoodResult result;
    result.point_index = j;

    Index scan_limit = 0;
    double stop_residual = -1.0; // negative: no residual stopping rule
    if (cfg.mode == TscMode::modified) {
        if (cfg.tau < 0) throw InvalidInputError("select_neighborhood: negative tau");
        scan_limit = effective_q_max(X, cfg);
        stop_residual = std::max(cfg.tau, cfg.zero_tol);
    } else {
        if (cfg.q < 1 || cfg.q > X.size() - 1) {
            throw InvalidInputError("select_neighborhood: fixed q must be in [1, N-1]");
        }
        scan_limit = cfg.q;
    }

    const RealVector x = X.points.col(j);
    GrowingBasis basis(X.ambient_dim());
    RealVector residual = x;
    result.residual_trace.reserve(static_cast<std::size_t>(scan_limit));

    Index q = 0;
    for (; q < scan_limit;) {
        const Index neighbor = ranked[static_cast<std::size_t>(q)];
        if (basis.try_add(X.points.col(neighbor))) {
            const RealVector newest = basis.last_column();
            residual -= newest * newest.dot(residual);
        }
        ++q;
        result.residual_trace.push_back(residual.norm());
        if (stop_residual >= 0 && result.residual_trace.back() <= stop_residual) break;
    }

    result.q_j = q;
    result.truncated = cfg.mode == TscMode::modified &&
                       result.residual_trace.back() > stop_residual;
    result.selected.assign(ranked.begin(), ranked.begin() + q);

    RealMatrix selected_cols(X.ambient_dim(), q);
    for (Index i = 0; i < q; ++i) {
        selected_cols.col(i) = X.points.col(result.selected[static_cast<std::size_t>(i)]);
    }
    result.coefficients = pseudo_inverse(selected_cols) * x;
    return result;
}

} // namespace

std::vector<Index> rank_neighbors(const Dataset& X, Index j) {
    validate_point_index(X, j, "rank_neighbors");
    require_finite(X.points, "rank_neighbors points");
    const RealVector corr = X.points.transpose() * X.points.col(j);
    return rank_from_correlations(corr, j);
}

NeighborhoodResult select_neighborhood(const Dataset& X, Index j, const TscConfig& cfg) {
    validate_point_index(X, j, "select_neighborhood");
    require_finite(X.points, "select_neighborhood points");
    const RealVector corr = X.points.transpose() * X.points.col(j);
    return select_impl(X, j, cfg, corr);
}

std::vector<NeighborhoodResult> select_all_neighborhoods(const Dataset& X,
                                                         const TscConfig& cfg) {
    if (X.size() < 2) {
        throw InvalidInputError("select_all_neighborhoods: need at least 2 points");
    }
    require_finite(X.points, "select_all_neighborhoods points");

    const Index n = X.size();
    std::vector<NeighborhoodResult> results(static_cast<std::size_t>(n));
    // One Gram computation covers every point's correlation column for
    // desk-scale N; fall back to per-point products when it would not fit.
    const bool use_gram = n <= 3000;
    RealMatrix gram;
    if (use_gram) gram = X.points.transpose() * X.points;

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
        const Index j = static_cast<Index>(idx);
        const RealVector corr =
            use_gram ? RealVector(gram.col(j))
                     : RealVector(X.points.transpose() * X.points.col(j));
        results[idx] = select_impl(X, j, cfg, corr);
    });
    return results;
}

} // namespace unionclust
