#pragma once

#include <Eigen/Dense>
#include <vector>

#include "unionclust/errors.hpp"

namespace unionclust {

// Indexing contract is (row, col); Eigen's default column-major storage
// matches the column-per-point layout used throughout.
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws InvalidInputError if M contains NaN or Inf.
void require_finite(const RealMatrix& M, const char* what);

/// Throws InvalidInputError unless U has orthonormal columns
/// (max |U^T U - I| <= tol).
void require_orthonormal(const RealMatrix& U, double tol, const char* what);

/// Default relative cutoff below which singular values are treated as zero.
inline double default_rank_tol(const RealMatrix& M) {
    return 1e-10 * static_cast<double>(std::max(M.rows(), M.cols()));
}

struct SpectrumResult {
    RealVector eigenvalues;  // ascending
    RealMatrix eigenvectors; // one unit-norm column per eigenvalue
};

/// Moore-Penrose pseudo-inverse via SVD. Singular values at or below
/// rank_tol * (largest singular value) are treated as zero.
RealMatrix pseudo_inverse(const RealMatrix& M, double rank_tol);
RealMatrix pseudo_inverse(const RealMatrix& M);

/// Euclidean distance from x to the column span of basis_cols, computed via
/// column-pivoted QR rather than an explicit projector.
double span_residual(const RealMatrix& basis_cols, const RealVector& x);

/// Principal angles between the column spans of U and V, ascending in
/// [0, pi/2]. Their cosines are the singular values of U^T V clamped to
/// [0, 1]. Both inputs must have orthonormal columns (checked to 1e-8).
std::vector<double> principal_angles(const RealMatrix& U, const RealMatrix& V);

/// Full spectrum of a symmetric matrix (checked to 1e-10 absolute),
/// eigenvalues ascending. Eigenvector signs are fixed — the first component
/// of magnitude above 1e-12 is made positive — so identical input bits give
/// identical output bits.
SpectrumResult symmetric_eigen(const RealMatrix& M);

/// Orthonormal basis grown one vector at a time by Gram-Schmidt with one
/// reorthogonalization pass. Vectors numerically inside the current span are
/// rejected; the span after k accepted vectors equals the span of everything
/// offered so far.
class GrowingBasis {
public:
    explicit GrowingBasis(Index rows, double drop_tol = 1e-12);

    /// Appends an orthonormal column if v extends the span; returns whether
    /// it did.
    bool try_add(const RealVector& v);

    /// Most recently accepted orthonormal column. Valid after try_add
    /// returned true.
    RealVector last_column() const;

    /// x minus its projection onto the current span.
    RealVector project_out(const RealVector& x) const;

    Index size() const { return cols_; }
    Index rows() const { return storage_.rows(); }

private:
    RealMatrix storage_; // first cols_ columns hold the basis
    Index cols_ = 0;
    double drop_tol_;
};

} // namespace unionclust
