#include "unionclust/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unionclust {

void require_finite(const RealMatrix& M, const char* what) {
    if (!M.allFinite()) {
        throw InvalidInputError(std::string(what) + ": non-finite entries");
    }
}

void require_orthonormal(const RealMatrix& U, double tol, const char* what) {
    require_finite(U, what);
    if (U.cols() == 0) return;
    const RealMatrix gram = U.transpose() * U;
    const double dev =
        (gram - RealMatrix::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff();
    if (dev > tol) {
        throw InvalidInputError(std::string(what) +
                                ": columns not orthonormal (deviation " +
                                std::to_string(dev) + ")");
    }
}

RealMatrix pseudo_inverse(const RealMatrix& M, double rank_tol) {
    if (M.size() == 0) throw InvalidInputError("pseudo_inverse: empty matrix");
    if (!(rank_tol > 0)) throw InvalidInputError("pseudo_inverse: rank_tol must be positive");
    require_finite(M, "pseudo_inverse");

    Eigen::BDCSVD<RealMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double cutoff = rank_tol * (sv.size() > 0 ? sv(0) : 0.0);
    RealVector inv = RealVector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

RealMatrix pseudo_inverse(const RealMatrix& M) {
    return pseudo_inverse(M, default_rank_tol(M));
}

double span_residual(const RealMatrix& basis_cols, const RealVector& x) {
    if (basis_cols.rows() != x.size()) {
        throw InvalidInputError("span_residual: dimension mismatch");
    }
    require_finite(basis_cols, "span_residual basis");
    require_finite(x, "span_residual x");
    const double xnorm = x.norm();
    if (basis_cols.cols() == 0) return xnorm;

    Eigen::ColPivHouseholderQR<RealMatrix> qr(basis_cols);
    const RealVector coeffs = qr.solve(x);
    const double r = (x - basis_cols * coeffs).norm();
    return std::clamp(r, 0.0, xnorm);
}

std::vector<double> principal_angles(const RealMatrix& U, const RealMatrix& V) {
    if (U.rows() != V.rows()) {
        throw InvalidInputError("principal_angles: row count mismatch");
    }
    require_orthonormal(U, 1e-8, "principal_angles U");
    require_orthonormal(V, 1e-8, "principal_angles V");

    Eigen::BDCSVD<RealMatrix> svd(U.transpose() * V);
    const RealVector& sv = svd.singularValues(); // descending
    std::vector<double> angles(static_cast<std::size_t>(sv.size()));
    for (Index i = 0; i < sv.size(); ++i) {
        angles[static_cast<std::size_t>(i)] = std::acos(std::clamp(sv(i), 0.0, 1.0));
    }
    return angles; // ascending, since cosines were descending
}

SpectrumResult symmetric_eigen(const RealMatrix& M) {
    if (M.size() == 0 || M.rows() != M.cols()) {
        throw InvalidInputError("symmetric_eigen: matrix must be square and nonempty");
    }
    require_finite(M, "symmetric_eigen");
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) {
        throw InvalidInputError("symmetric_eigen: input not symmetric (max asymmetry " +
                                std::to_string(asym) + ")");
    }

    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(M);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric_eigen: eigensolver did not converge");
    }

    SpectrumResult out{solver.eigenvalues(), solver.eigenvectors()};
    // Sign convention: first component of magnitude > 1e-12 made positive.
    for (Index c = 0; c < out.eigenvectors.cols(); ++c) {
        for (Index r = 0; r < out.eigenvectors.rows(); ++r) {
            const double v = out.eigenvectors(r, c);
            if (std::abs(v) > 1e-12) {
                if (v < 0) out.eigenvectors.col(c) *= -1.0;
                break;
            }
        }
    }
    return out;
}

GrowingBasis::GrowingBasis(Index rows, double drop_tol)
    : storage_(rows, 8), cols_(0), drop_tol_(drop_tol) {
    if (rows < 1) throw InvalidInputError("GrowingBasis: rows must be positive");
}

bool GrowingBasis::try_add(const RealVector& v) {
    if (v.size() != storage_.rows()) {
        throw InvalidInputError("GrowingBasis::try_add: dimension mismatch");
    }
    RealVector w = v;
    for (int pass = 0; pass < 2 && cols_ > 0; ++pass) {
        auto q = storage_.leftCols(cols_);
        w -= q * (q.transpose() * w);
    }
    const double n = w.norm();
    if (n <= drop_tol_ * std::max(1.0, v.norm())) return false;

    if (cols_ == storage_.cols()) {
        storage_.conservativeResize(Eigen::NoChange, 2 * storage_.cols());
    }
    storage_.col(cols_++) = w / n;
    return true;
}

RealVector GrowingBasis::last_column() const {
    if (cols_ == 0) throw InvalidInputError("GrowingBasis::last_column: basis is empty");
    return storage_.col(cols_ - 1);
}

RealVector GrowingBasis::project_out(const RealVector& x) const {
    if (x.size() != storage_.rows()) {
        throw InvalidInputError("GrowingBasis::project_out: dimension mismatch");
    }
    if (cols_ == 0) return x;
    auto q = storage_.leftCols(cols_);
    return x - q * (q.transpose() * x);
}

} // namespace unionclust
