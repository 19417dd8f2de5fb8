#include <doctest.h>

#include <cmath>

#include "unionclust/datagen.hpp"
#include "unionclust/numerics.hpp"
#include "unionclust/rng.hpp"

using namespace unionclust;

namespace {

RealMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    RealMatrix m(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) m(r, c) = rng.gaussian();
    }
    return m;
}

} // namespace

TEST_CASE("pseudo_inverse identity and closed forms") {
    const RealMatrix eye = RealMatrix::Identity(3, 3);
    CHECK((pseudo_inverse(eye) - eye).cwiseAbs().maxCoeff() < 1e-12);

    // single column (3,4)^T: pinv is v^T / ||v||^2
    RealMatrix v(3, 1);
    v << 3, 4, 0;
    const RealMatrix pinv = pseudo_inverse(v);
    REQUIRE(pinv.rows() == 1);
    REQUIRE(pinv.cols() == 3);
    CHECK(pinv(0, 0) == doctest::Approx(3.0 / 25.0).epsilon(1e-12));
    CHECK(pinv(0, 1) == doctest::Approx(4.0 / 25.0).epsilon(1e-12));
    CHECK(pinv(0, 2) == doctest::Approx(0.0).epsilon(1e-12));

    // all singular values below tolerance
    const RealMatrix zero = RealMatrix::Zero(2, 2);
    CHECK(pseudo_inverse(zero).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pseudo_inverse rejects bad input") {
    RealMatrix bad(2, 2);
    bad << 1, 2, 3, std::nan("");
    CHECK_THROWS_AS(pseudo_inverse(bad), InvalidInputError);
    CHECK_THROWS_AS(pseudo_inverse(RealMatrix(0, 0)), InvalidInputError);
    CHECK_THROWS_AS(pseudo_inverse(RealMatrix::Identity(2, 2), 0.0), InvalidInputError);
}

TEST_CASE("pseudo_inverse Moore-Penrose identities on random matrices") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        RealMatrix m = random_matrix(7, 4, seed);
        if (seed % 2 == 1) m.col(3) = 2.0 * m.col(0) - m.col(1); // rank-deficient
        const RealMatrix p = pseudo_inverse(m);
        const double scale = std::max(1.0, m.norm());
        CHECK((m * p * m - m).norm() <= 1e-8 * scale);
        CHECK((p * m * p - p).norm() <= 1e-8 * std::max(1.0, p.norm()));
        CHECK((m * p - (m * p).transpose()).norm() <= 1e-8 * scale);
        CHECK((p * m - (p * m).transpose()).norm() <= 1e-8 * scale);
    }
}

TEST_CASE("span_residual basic geometry") {
    RealMatrix e1(2, 1);
    e1 << 1, 0;
    RealVector x(2);

    x << 1, 0;
    CHECK(span_residual(e1, x) == doctest::Approx(0.0).epsilon(1e-12));
    x << 0, 1;
    CHECK(span_residual(e1, x) == doctest::Approx(1.0).epsilon(1e-12));

    // distance from e1 to the line at 10 degrees is |sin(10 deg)|
    const double theta = 10.0 * M_PI / 180.0;
    RealMatrix line(2, 1);
    line << std::cos(theta), std::sin(theta);
    x << 1, 0;
    CHECK(span_residual(line, x) == doctest::Approx(std::sin(theta)).epsilon(1e-12));
}

TEST_CASE("span_residual vanishes on linear combinations") {
    const RealMatrix b = random_matrix(9, 4, 11);
    Rng rng(12);
    RealVector w(4);
    for (Index i = 0; i < 4; ++i) w(i) = rng.gaussian();
    const RealVector x = b * w;
    CHECK(span_residual(b, x) <= 1e-8 * std::max(1.0, x.norm()));
}

TEST_CASE("span_residual invariant to column permutation and rescaling") {
    const RealMatrix b = random_matrix(8, 3, 21);
    Rng rng(22);
    RealVector x(8);
    for (Index i = 0; i < 8; ++i) x(i) = rng.gaussian();
    const double base = span_residual(b, x);

    RealMatrix permuted(8, 3);
    permuted.col(0) = b.col(2);
    permuted.col(1) = b.col(0);
    permuted.col(2) = b.col(1);
    CHECK(span_residual(permuted, x) == doctest::Approx(base).epsilon(1e-10));

    RealMatrix rescaled = b;
    rescaled.col(0) *= -3.5;
    rescaled.col(2) *= 0.01;
    CHECK(span_residual(rescaled, x) == doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("span_residual dimension mismatch") {
    CHECK_THROWS_AS(span_residual(RealMatrix::Identity(3, 2), RealVector::Ones(4)),
                    InvalidInputError);
}

TEST_CASE("principal_angles canonical cases") {
    const RealMatrix eye4 = RealMatrix::Identity(4, 4);

    SUBCASE("identical subspaces") {
        const RealMatrix u = eye4.leftCols(2);
        const auto angles = principal_angles(u, u);
        REQUIRE(angles.size() == 2);
        CHECK(angles[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(angles[1] == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("orthogonal subspaces") {
        const auto angles = principal_angles(eye4.leftCols(2), eye4.rightCols(2));
        REQUIRE(angles.size() == 2);
        CHECK(angles[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
        CHECK(angles[1] == doctest::Approx(M_PI / 2).epsilon(1e-12));
    }

    SUBCASE("partially shared subspaces") {
        RealMatrix u = RealMatrix::Zero(4, 2), v = RealMatrix::Zero(4, 2);
        u(0, 0) = 1;
        u(1, 1) = 1; // span{e1, e2}
        v(0, 0) = 1;
        v(2, 1) = 1; // span{e1, e3}
        const auto angles = principal_angles(u, v);
        REQUIRE(angles.size() == 2);
        CHECK(angles[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(angles[1] == doctest::Approx(M_PI / 2).epsilon(1e-12));
    }
}

TEST_CASE("principal_angles symmetric in arguments") {
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        Rng rng(seed);
        const RealMatrix u = haar_orthonormal(9, 3, rng);
        const RealMatrix v = haar_orthonormal(9, 4, rng);
        const auto uv = principal_angles(u, v);
        const auto vu = principal_angles(v, u);
        REQUIRE(uv.size() == vu.size());
        for (std::size_t i = 0; i < uv.size(); ++i) {
            CHECK(std::abs(uv[i] - vu[i]) <= 1e-10);
        }
    }
}

TEST_CASE("principal_angles rejects non-orthonormal input") {
    RealMatrix bad(3, 2);
    bad << 1, 1, 0, 1, 0, 0;
    CHECK_THROWS_AS(principal_angles(bad, RealMatrix::Identity(3, 2)), InvalidInputError);
}

TEST_CASE("symmetric_eigen examples") {
    SUBCASE("identity") {
        const auto s = symmetric_eigen(RealMatrix::Identity(4, 4));
        for (Index i = 0; i < 4; ++i) CHECK(s.eigenvalues(i) == doctest::Approx(1.0));
    }

    SUBCASE("diagonal") {
        RealMatrix d = RealMatrix::Zero(3, 3);
        d.diagonal() << 3, 1, 2;
        const auto s = symmetric_eigen(d);
        CHECK(s.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(s.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-12));
    }

    SUBCASE("swap matrix has eigenvalues -1, 1") {
        RealMatrix m(2, 2);
        m << 0, 1, 1, 0;
        const auto s = symmetric_eigen(m);
        CHECK(s.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(s.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("bitwise deterministic") {
        RealMatrix m = random_matrix(6, 6, 41);
        m = RealMatrix(m + m.transpose());
        const auto a = symmetric_eigen(m);
        const auto b = symmetric_eigen(m);
        CHECK(a.eigenvalues == b.eigenvalues);
        CHECK(a.eigenvectors == b.eigenvectors);
    }
}

TEST_CASE("symmetric_eigen contract invariants") {
    RealMatrix m = random_matrix(8, 8, 51);
    m = RealMatrix(m + m.transpose());
    const auto s = symmetric_eigen(m);

    for (Index i = 1; i < 8; ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i - 1));
    CHECK(s.eigenvalues.sum() == doctest::Approx(m.trace()).epsilon(1e-8));

    const double scale = std::max(1.0, m.norm());
    for (Index i = 0; i < 8; ++i) {
        CHECK(s.eigenvectors.col(i).norm() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK((m * s.eigenvectors.col(i) - s.eigenvalues(i) * s.eigenvectors.col(i))
                  .norm() <= 1e-8 * scale);
    }
}

TEST_CASE("symmetric_eigen rejects asymmetric input") {
    RealMatrix m(2, 2);
    m << 0, 1, 2, 0;
    CHECK_THROWS_AS(symmetric_eigen(m), InvalidInputError);
}

TEST_CASE("GrowingBasis spans offered vectors and rejects dependent ones") {
    GrowingBasis basis(5);
    RealVector v = RealVector::Zero(5);
    v(0) = 2.0;
    CHECK(basis.try_add(v));
    CHECK_FALSE(basis.try_add(v)); // already spanned
    v(1) = 1.0;
    CHECK(basis.try_add(v));
    CHECK(basis.size() == 2);

    RealVector x = RealVector::Zero(5);
    x(0) = 3.0;
    x(1) = -1.0;
    CHECK(basis.project_out(x).norm() <= 1e-12);
    x(4) = 2.0;
    CHECK(basis.project_out(x).norm() == doctest::Approx(2.0).epsilon(1e-12));
}
