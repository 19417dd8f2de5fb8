#include "unionclust/datagen.hpp"

#include <cmath>
#include <string>

#include "unionclust/errors.hpp"

namespace unionclust {

namespace {

RealMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    RealMatrix out(rows, cols);
    // column-major fill so the stream layout matches the storage layout
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) out(r, c) = rng.gaussian();
    }
    return out;
}

void validate_config(const SynthConfig& cfg) {
    if (cfg.L < 1) throw InvalidInputError("make_subspaces: L must be >= 1");
    if (cfg.shared_dims > cfg.d || cfg.d > cfg.m) {
        throw InvalidInputError("make_subspaces: need shared_dims <= d <= m");
    }
    if (cfg.d < 1) throw InvalidInputError("make_subspaces: d must be >= 1");
    if (cfg.noise_var < 0) throw InvalidInputError("make_subspaces: negative noise variance");
}

} // namespace

void normalize_columns(RealMatrix& points) {
    for (Index c = 0; c < points.cols(); ++c) {
        const double n = points.col(c).norm();
        if (n < 1e-12) {
            throw NumericalError("normalize_columns: column " + std::to_string(c) +
                                 " is numerically zero");
        }
        points.col(c) /= n;
    }
}

RealMatrix sample_uniform_sphere(Index d, Index n, std::uint64_t seed) {
    if (d < 1) throw InvalidInputError("sample_uniform_sphere: d must be >= 1");
    if (n < 1) throw InvalidInputError("sample_uniform_sphere: n must be >= 1");
    Rng rng(seed);
    RealMatrix out(d, n);
    for (Index c = 0; c < n; ++c) {
        double norm = 0.0;
        do {
            for (Index r = 0; r < d; ++r) out(r, c) = rng.gaussian();
            norm = out.col(c).norm();
        } while (norm < 1e-300);
        out.col(c) /= norm;
    }
    return out;
}

RealMatrix haar_orthonormal(Index rows, Index cols, Rng& rng) {
    if (rows < 1 || cols < 0 || cols > rows) {
        throw InvalidInputError("haar_orthonormal: need 0 <= cols <= rows");
    }
    if (cols == 0) return RealMatrix(rows, 0);

    const RealMatrix g = gaussian_matrix(rows, cols, rng);
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ() * RealMatrix::Identity(rows, cols);
    const RealMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    // Fixing R's diagonal signs makes the distribution Haar and the draw
    // reproducible regardless of the QR implementation's sign choices.
    for (Index j = 0; j < cols; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
}

SubspaceModel make_subspaces(const SynthConfig& cfg) {
    validate_config(cfg);
    const Index m = cfg.m, d = cfg.d, p = cfg.shared_dims;

    Rng shared_rng(derive_seed(cfg.seed, "shared-block"));
    const RealMatrix shared = haar_orthonormal(m, p, shared_rng);

    SubspaceModel model;
    model.ambient_dim = m;
    model.dims.assign(static_cast<std::size_t>(cfg.L), d);
    model.bases.reserve(static_cast<std::size_t>(cfg.L));

    for (Index l = 0; l < cfg.L; ++l) {
        Rng rng(derive_seed(cfg.seed, "basis", static_cast<std::uint64_t>(l)));
        RealMatrix basis(m, d);
        basis.leftCols(p) = shared;
        for (int attempt = 0;; ++attempt) {
            if (d > p) {
                RealMatrix g = gaussian_matrix(m, d - p, rng);
                if (p > 0) g -= shared * (shared.transpose() * g);
                Eigen::HouseholderQR<RealMatrix> qr(g);
                RealMatrix q = qr.householderQ() * RealMatrix::Identity(m, d - p);
                const RealMatrix r =
                    qr.matrixQR().topRows(d - p).triangularView<Eigen::Upper>();
                for (Index j = 0; j < d - p; ++j) {
                    if (r(j, j) < 0) q.col(j) *= -1.0;
                }
                basis.rightCols(d - p) = q;
            }
            const double dev = (basis.transpose() * basis - RealMatrix::Identity(d, d))
                                   .norm();
            if (dev <= 1e-9) break;
            if (attempt >= 3) {
                throw NumericalError("make_subspaces: failed to orthonormalize basis " +
                                     std::to_string(l));
            }
        }
        model.bases.push_back(std::move(basis));
    }
    return model;
}

Dataset make_dataset(const SubspaceModel& model, const std::vector<Index>& n_per,
                     double noise_var, std::uint64_t seed) {
    const Index L = model.num_subspaces();
    if (static_cast<Index>(n_per.size()) != L) {
        throw InvalidInputError("make_dataset: n_per length must match subspace count");
    }
    if (noise_var < 0) throw InvalidInputError("make_dataset: negative noise variance");
    Index total = 0;
    for (Index l = 0; l < L; ++l) {
        if (n_per[static_cast<std::size_t>(l)] < 1) {
            throw InvalidInputError("make_dataset: n_per[" + std::to_string(l) +
                                    "] must be >= 1");
        }
        total += n_per[static_cast<std::size_t>(l)];
    }

    const Index m = model.ambient_dim;
    Dataset data;
    data.points.resize(m, total);
    data.labels = std::vector<int>(static_cast<std::size_t>(total));
    data.per_cluster_counts = n_per;

    Index col = 0;
    for (Index l = 0; l < L; ++l) {
        const Index n_l = n_per[static_cast<std::size_t>(l)];
        const Index d_l = model.dims[static_cast<std::size_t>(l)];
        const RealMatrix coeffs = sample_uniform_sphere(
            d_l, n_l, derive_seed(seed, "coeffs", static_cast<std::uint64_t>(l)));
        RealMatrix block = model.bases[static_cast<std::size_t>(l)] * coeffs;
        if (noise_var > 0) {
            Rng noise_rng(derive_seed(seed, "noise", static_cast<std::uint64_t>(l)));
            const double scale = std::sqrt(noise_var / static_cast<double>(m));
            for (Index c = 0; c < n_l; ++c) {
                for (Index r = 0; r < m; ++r) block(r, c) += scale * noise_rng.gaussian();
            }
        }
        normalize_columns(block);
        data.points.middleCols(col, n_l) = block;
        for (Index c = 0; c < n_l; ++c) {
            (*data.labels)[static_cast<std::size_t>(col + c)] = static_cast<int>(l);
        }
        if (n_l == 1) {
            data.warnings.push_back("cluster " + std::to_string(l) +
                                    " has a single point; it cannot form a connected "
                                    "subgraph with the rest of its subspace");
        }
        col += n_l;
    }
    return data;
}

Dataset synth_instance(const SynthConfig& cfg, SubspaceModel* model_out) {
    if (cfg.n_per_subspace < 1) {
        throw InvalidInputError("synth_instance: n_per_subspace must be >= 1");
    }
    SubspaceModel model = make_subspaces(cfg);
    const std::vector<Index> n_per(static_cast<std::size_t>(cfg.L), cfg.n_per_subspace);
    Dataset data =
        make_dataset(model, n_per, cfg.noise_var, derive_seed(cfg.seed, "points"));
    if (model_out != nullptr) *model_out = std::move(model);
    return data;
}

} // namespace unionclust
