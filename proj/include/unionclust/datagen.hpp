#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unionclust/numerics.hpp"
#include "unionclust/rng.hpp"

namespace unionclust {

/// Ground-truth union-of-subspaces model: one orthonormal basis per subspace.
struct SubspaceModel {
    Index ambient_dim = 0;
    std::vector<RealMatrix> bases; // each ambient_dim x dims[l]
    std::vector<Index> dims;

    Index num_subspaces() const { return static_cast<Index>(bases.size()); }
};

/// Column-per-point collection of unit-norm vectors with optional labels.
struct Dataset {
    RealMatrix points; // ambient_dim x N, unit-norm columns
    std::optional<std::vector<int>> labels; // cluster id per column, in [0, L)
    std::vector<Index> per_cluster_counts;
    std::vector<std::string> warnings;

    Index ambient_dim() const { return points.rows(); }
    Index size() const { return points.cols(); }
};

struct SynthConfig {
    Index m = 120;            // ambient dimension
    Index L = 8;              // number of subspaces
    Index d = 30;             // dimension of each subspace
    Index shared_dims = 10;   // leading basis columns common to all subspaces
    Index n_per_subspace = 50;
    double noise_var = 0.0;   // sigma^2; per-coordinate variance is sigma^2/m
    std::uint64_t seed = 0;
};

/// d x n matrix whose columns are i.i.d. uniform on the unit sphere S^{d-1}
/// (standard Gaussian vectors, normalized). Deterministic for a fixed seed.
RealMatrix sample_uniform_sphere(Index d, Index n, std::uint64_t seed);

/// Haar-distributed orthonormal frame: QR of an i.i.d. Gaussian matrix with
/// the diagonal of R made positive.
RealMatrix haar_orthonormal(Index rows, Index cols, Rng& rng);

/// L orthonormal bases sharing their first shared_dims columns; the
/// remaining columns are Haar-like draws orthonormalized against the shared
/// block, so every pair of subspaces intersects in >= shared_dims dimensions.
SubspaceModel make_subspaces(const SynthConfig& cfg);

/// Points drawn uniformly on each subspace's unit sphere, plus optional
/// N(0, (noise_var/m) I) noise, then renormalized to unit norm. Ground-truth
/// labels attached. Deterministic for a fixed seed.
Dataset make_dataset(const SubspaceModel& model, const std::vector<Index>& n_per,
                     double noise_var, std::uint64_t seed);

/// Full synthetic instance from one config; sub-seeds for the model and the
/// points are derived from cfg.seed.
Dataset synth_instance(const SynthConfig& cfg, SubspaceModel* model_out = nullptr);

/// Rescales every column to unit l2 norm. Throws NumericalError on a
/// numerically zero column.
void normalize_columns(RealMatrix& points);

} // namespace unionclust
