#include "unionclust/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <string>

#include "unionclust/datagen.hpp"
#include "unionclust/rng.hpp"

namespace unionclust {

namespace {

// BFS over an arbitrary edge predicate; returns nodes reached from start.
template <typename EdgeFn>
std::vector<char> bfs_reach(Index n, Index start, EdgeFn&& has_edge) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<Index> queue{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!queue.empty()) {
        const Index u = queue.front();
        queue.pop_front();
        for (Index v = 0; v < n; ++v) {
            if (!seen[static_cast<std::size_t>(v)] && has_edge(u, v)) {
                seen[static_cast<std::size_t>(v)] = 1;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

} // namespace

AffinityGraph build_adjacency(const std::vector<NeighborhoodResult>& results, Index N) {
    if (N < 1) throw InvalidInputError("build_adjacency: N must be >= 1");
    std::vector<char> covered(static_cast<std::size_t>(N), 0);
    RealMatrix z = RealMatrix::Zero(N, N);

    for (const NeighborhoodResult& r : results) {
        if (r.point_index < 0 || r.point_index >= N) {
            throw InvalidInputError("build_adjacency: point index out of range");
        }
        if (static_cast<Index>(r.selected.size()) != r.coefficients.size()) {
            throw InvalidInputError(
                "build_adjacency: selected/coefficients size mismatch for point " +
                std::to_string(r.point_index));
        }
        covered[static_cast<std::size_t>(r.point_index)] = 1;
        for (std::size_t k = 0; k < r.selected.size(); ++k) {
            const Index i = r.selected[k];
            if (i < 0 || i >= N) {
                throw InvalidInputError("build_adjacency: neighbor index out of range");
            }
            if (i == r.point_index) {
                throw InvalidInputError("build_adjacency: self-selection at point " +
                                        std::to_string(i));
            }
            z(i, r.point_index) = std::abs(r.coefficients(static_cast<Index>(k)));
        }
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
        throw InvalidInputError("build_adjacency: results do not cover every point");
    }

    AffinityGraph graph{z + z.transpose()};
    graph.adjacency.diagonal().setZero();
    return graph;
}

AffinityGraph pruned(const AffinityGraph& G, double threshold) {
    if (threshold < 0) throw InvalidInputError("pruned: negative threshold");
    AffinityGraph out = G;
    out.adjacency = (out.adjacency.array() > threshold).select(out.adjacency, 0.0);
    return out;
}

ComponentLabeling connected_components(const AffinityGraph& G) {
    const Index n = G.size();
    ComponentLabeling labeling;
    labeling.component_id.assign(static_cast<std::size_t>(n), -1);

    const RealMatrix& a = G.adjacency;
    int next_id = 0;
    for (Index start = 0; start < n; ++start) {
        if (labeling.component_id[static_cast<std::size_t>(start)] != -1) continue;
        const auto seen =
            bfs_reach(n, start, [&](Index u, Index v) { return a(u, v) > 0.0; });
        for (Index v = 0; v < n; ++v) {
            if (seen[static_cast<std::size_t>(v)]) {
                labeling.component_id[static_cast<std::size_t>(v)] = next_id;
            }
        }
        ++next_id;
    }
    labeling.component_count = next_id;
    return labeling;
}

DiagnosticsReport diagnostics(const AffinityGraph& G, const std::vector<int>& truth) {
    const Index n = G.size();
    if (static_cast<Index>(truth.size()) != n) {
        throw InvalidInputError("diagnostics: truth labels must cover all nodes");
    }
    int num_clusters = 0;
    for (int t : truth) {
        if (t < 0) throw InvalidInputError("diagnostics: negative truth label");
        num_clusters = std::max(num_clusters, t + 1);
    }

    DiagnosticsReport report;
    const RealMatrix& a = G.adjacency;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (a(i, j) > 0.0 && truth[static_cast<std::size_t>(i)] !=
                                     truth[static_cast<std::size_t>(j)]) {
                ++report.false_connection_count;
            }
        }
    }

    report.per_cluster_connected.assign(static_cast<std::size_t>(num_clusters), true);
    for (int l = 0; l < num_clusters; ++l) {
        std::vector<Index> members;
        for (Index i = 0; i < n; ++i) {
            if (truth[static_cast<std::size_t>(i)] == l) members.push_back(i);
        }
        if (members.size() <= 1) continue;
        const auto in_cluster = [&](Index u, Index v) {
            return truth[static_cast<std::size_t>(u)] == l &&
                   truth[static_cast<std::size_t>(v)] == l && a(u, v) > 0.0;
        };
        const auto seen = bfs_reach(n, members.front(), in_cluster);
        for (Index mbr : members) {
            if (!seen[static_cast<std::size_t>(mbr)]) {
                report.per_cluster_connected[static_cast<std::size_t>(l)] = false;
                break;
            }
        }
    }

    report.exact_component_match =
        report.false_connection_count == 0 &&
        std::all_of(report.per_cluster_connected.begin(),
                    report.per_cluster_connected.end(), [](bool b) { return b; });
    return report;
}

double lemma1_connectivity(Index n, Index d, Index k, Index trials, std::uint64_t seed) {
    if (d <= 1) throw InvalidInputError("lemma1_connectivity: requires d > 1");
    if (n < 2) throw InvalidInputError("lemma1_connectivity: n must be >= 2");
    if (k < 1 || k > n - 1) {
        throw InvalidInputError("lemma1_connectivity: k must be in [1, n-1]");
    }
    if (trials < 1) throw InvalidInputError("lemma1_connectivity: trials must be >= 1");

    Index connected = 0;
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index t = 0; t < trials; ++t) {
        const RealMatrix pts = sample_uniform_sphere(
            d, n, derive_seed(seed, "lemma1-trial", static_cast<std::uint64_t>(t)));
        const RealMatrix corr = (pts.transpose() * pts).cwiseAbs();

        // symmetric (union) kNN graph under acos|<.,.>|
        std::vector<char> edge(static_cast<std::size_t>(n * n), 0);
        for (Index i = 0; i < n; ++i) {
            std::iota(order.begin(), order.end(), Index{0});
            std::sort(order.begin(), order.end(), [&](Index a, Index b) {
                if (a == i) return false; // self ranks last
                if (b == i) return true;
                const double ca = corr(i, a), cb = corr(i, b);
                if (ca != cb) return ca > cb;
                return a < b;
            });
            for (Index r = 0; r < k; ++r) {
                const Index j = order[static_cast<std::size_t>(r)];
                edge[static_cast<std::size_t>(i * n + j)] = 1;
                edge[static_cast<std::size_t>(j * n + i)] = 1;
            }
        }

        const auto seen = bfs_reach(n, Index{0}, [&](Index u, Index v) {
            return edge[static_cast<std::size_t>(u * n + v)] != 0;
        });
        if (std::find(seen.begin(), seen.end(), 0) == seen.end()) ++connected;
    }
    return static_cast<double>(connected) / static_cast<double>(trials);
}

void write_edge_list_csv(const AffinityGraph& G, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_edge_list_csv: cannot open " + path);
    out << "i,j,weight\n";
    char buf[64];
    const RealMatrix& a = G.adjacency;
    for (Index i = 0; i < G.size(); ++i) {
        for (Index j = i + 1; j < G.size(); ++j) {
            if (a(i, j) > 0.0) {
                std::snprintf(buf, sizeof(buf), "%.17g", a(i, j));
                out << i << ',' << j << ',' << buf << '\n';
            }
        }
    }
    if (!out) throw IoError("write_edge_list_csv: write failed for " + path);
}

} // namespace unionclust
