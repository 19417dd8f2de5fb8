#include "unionclust/eval.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace unionclust {

namespace {

// Hungarian method with potentials, O(n^3), minimizing total cost of a
// square integer matrix. Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(cost.size());
    const long long kInf = LLONG_MAX / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            long long delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    }
    return row_to_col;
}

// Dense relabeling by sorted distinct value; returns the number of labels.
int densify(const std::vector<int>& labels, std::vector<int>& out) {
    std::map<int, int> remap;
    for (int l : labels) remap.emplace(l, 0);
    int next = 0;
    for (auto& [key, id] : remap) id = next++;
    out.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
    return next;
}

} // namespace

double clustering_error(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) {
        throw InvalidInputError("clustering_error: label sequences differ in length");
    }
    if (predicted.empty()) {
        throw InvalidInputError("clustering_error: empty label sequences");
    }

    std::vector<int> pred, gt;
    const int kp = densify(predicted, pred);
    const int kt = densify(truth, gt);
    const int k = std::max(kp, kt); // zero-padded square contingency

    std::vector<std::vector<long long>> contingency(
        static_cast<std::size_t>(k), std::vector<long long>(static_cast<std::size_t>(k), 0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ++contingency[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(gt[i])];
    }

    // maximize matched count == minimize negated contingency
    std::vector<std::vector<long long>> cost = contingency;
    for (auto& row : cost) {
        for (long long& c : row) c = -c;
    }
    const std::vector<int> assign = min_cost_assignment(cost);

    long long matched = 0;
    for (int r = 0; r < k; ++r) {
        matched += contingency[static_cast<std::size_t>(r)]
                              [static_cast<std::size_t>(assign[static_cast<std::size_t>(r)])];
    }
    return 1.0 - static_cast<double>(matched) / static_cast<double>(pred.size());
}

double affinity(const RealMatrix& U, const RealMatrix& V) {
    if (U.rows() != V.rows()) throw InvalidInputError("affinity: row count mismatch");
    if (U.cols() < 1 || V.cols() < 1) {
        throw InvalidInputError("affinity: subspaces must have dimension >= 1");
    }
    require_orthonormal(U, 1e-8, "affinity U");
    require_orthonormal(V, 1e-8, "affinity V");
    const double frob = (U.transpose() * V).norm();
    const double a = frob / std::sqrt(static_cast<double>(std::min(U.cols(), V.cols())));
    return std::clamp(a, 0.0, 1.0);
}

double affinity_via_angles(const RealMatrix& U, const RealMatrix& V) {
    if (U.cols() < 1 || V.cols() < 1) {
        throw InvalidInputError("affinity_via_angles: subspaces must have dimension >= 1");
    }
    const std::vector<double> angles = principal_angles(U, V);
    double sum_cos2 = 0.0;
    for (double theta : angles) {
        const double c = std::cos(theta);
        sum_cos2 += c * c;
    }
    const double a = std::sqrt(sum_cos2) / std::sqrt(static_cast<double>(angles.size()));
    return std::clamp(a, 0.0, 1.0);
}

TheoremReport theorem_check(const SubspaceModel& model, const std::vector<Index>& n_per,
                            const TheoremCheckConfig& cfg) {
    const Index L = model.num_subspaces();
    if (L < 1 || model.dims.size() != static_cast<std::size_t>(L)) {
        throw InvalidInputError("theorem_check: inconsistent model");
    }
    if (static_cast<Index>(n_per.size()) != L) {
        throw InvalidInputError("theorem_check: n_per length must match subspace count");
    }
    if (!(cfg.c2 > 0) || !(cfg.min_points_ratio > 0)) {
        throw InvalidInputError("theorem_check: config constants must be positive");
    }
    Index total = 0;
    for (Index n : n_per) {
        if (n < 1) throw InvalidInputError("theorem_check: every n_l must be >= 1");
        total += n;
    }
    if (total < 2) throw InvalidInputError("theorem_check: need N >= 2");

    TheoremReport report;
    report.max_affinity = 0.0;
    for (Index k = 0; k < L; ++k) {
        for (Index l = k + 1; l < L; ++l) {
            report.max_affinity =
                std::max(report.max_affinity,
                         affinity(model.bases[static_cast<std::size_t>(k)],
                                  model.bases[static_cast<std::size_t>(l)]));
        }
    }
    report.affinity_threshold = 1.0 / (15.0 * std::log(static_cast<double>(total)));
    report.affinity_ok = report.max_affinity <= report.affinity_threshold;

    report.ratio_ok.resize(static_cast<std::size_t>(L));
    report.dim_ok.resize(static_cast<std::size_t>(L));
    bool all = report.affinity_ok;
    for (Index l = 0; l < L; ++l) {
        const double n_l = static_cast<double>(n_per[static_cast<std::size_t>(l)]);
        const double d_l = static_cast<double>(model.dims[static_cast<std::size_t>(l)]);
        const bool ratio = n_l / d_l >= cfg.min_points_ratio;
        const bool dim = d_l >= cfg.c2 * std::log(n_l);
        report.ratio_ok[static_cast<std::size_t>(l)] = ratio;
        report.dim_ok[static_cast<std::size_t>(l)] = dim;
        all = all && ratio && dim;
    }
    report.all_ok = all;
    return report;
}

std::string theorem_report_to_json(const TheoremReport& report) {
    nlohmann::json j;
    j["max_affinity"] = report.max_affinity;
    j["affinity_threshold"] = report.affinity_threshold;
    j["affinity_ok"] = report.affinity_ok;
    j["ratio_ok"] = report.ratio_ok;
    j["dim_ok"] = report.dim_ok;
    j["all_ok"] = report.all_ok;
    return j.dump(2);
}

} // namespace unionclust
