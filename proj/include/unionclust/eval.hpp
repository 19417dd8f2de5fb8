#pragma once

#include <string>
#include <vector>

#include "unionclust/datagen.hpp"
#include "unionclust/numerics.hpp"

namespace unionclust {

struct TheoremCheckConfig {
    double c2 = 1.0;              // constant in d_l >= c2 * log(n_l)
    double min_points_ratio = 6.0; // required n_l / d_l
};

/// Precondition report for the exact-segmentation guarantee. Purely a
/// report; no probabilistic claim is computed.
struct TheoremReport {
    double max_affinity = 0.0;
    double affinity_threshold = 0.0; // 1 / (15 ln N)
    bool affinity_ok = false;
    std::vector<bool> ratio_ok; // n_l / d_l >= min_points_ratio
    std::vector<bool> dim_ok;   // d_l >= c2 * ln(n_l)
    bool all_ok = false;
};

/// Fraction of misclassified points after a maximum-weight matching
/// (Hungarian method) between predicted and true labels. The contingency
/// matrix is zero-padded to square when the label counts differ.
double clustering_error(const std::vector<int>& predicted, const std::vector<int>& truth);

/// ||U^T V||_F / sqrt(min(d_U, d_V)), clamped to [0, 1]. Inputs must have
/// orthonormal columns.
double affinity(const RealMatrix& U, const RealMatrix& V);

/// Same quantity through the principal angles:
/// sqrt(sum cos^2(theta_i)) / sqrt(min(d_U, d_V)). Agrees with affinity() to
/// 1e-10 by construction.
double affinity_via_angles(const RealMatrix& U, const RealMatrix& V);

/// Evaluates the guarantee's hypotheses for a ground-truth model:
/// max pairwise affinity against 1/(15 ln N) (natural log), and the per-
/// subspace point-count and dimension conditions.
TheoremReport theorem_check(const SubspaceModel& model, const std::vector<Index>& n_per,
                            const TheoremCheckConfig& cfg);

std::string theorem_report_to_json(const TheoremReport& report);

} // namespace unionclust
