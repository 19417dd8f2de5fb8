#include <doctest.h>

#include <cmath>

#include "unionclust/datagen.hpp"
#include "unionclust/eval.hpp"
#include "unionclust/rng.hpp"

using namespace unionclust;

TEST_CASE("sample_uniform_sphere degenerate and basic cases") {
    SUBCASE("sphere in R^1 is {-1, +1}") {
        const RealMatrix pts = sample_uniform_sphere(1, 5, 3);
        for (Index c = 0; c < 5; ++c) {
            CHECK(std::abs(std::abs(pts(0, c)) - 1.0) <= 1e-15);
        }
    }

    SUBCASE("columns are unit norm") {
        const RealMatrix pts = sample_uniform_sphere(3, 1000, 4);
        for (Index c = 0; c < pts.cols(); ++c) {
            CHECK(std::abs(pts.col(c).norm() - 1.0) <= 1e-12);
        }
    }

    SUBCASE("coordinate means vanish by symmetry") {
        const RealMatrix pts = sample_uniform_sphere(2, 10000, 5);
        CHECK(std::abs(pts.row(0).mean()) < 0.05);
        CHECK(std::abs(pts.row(1).mean()) < 0.05);
    }

    SUBCASE("deterministic per seed") {
        CHECK(sample_uniform_sphere(4, 7, 9) == sample_uniform_sphere(4, 7, 9));
    }

    CHECK_THROWS_AS(sample_uniform_sphere(0, 3, 1), InvalidInputError);
    CHECK_THROWS_AS(sample_uniform_sphere(3, 0, 1), InvalidInputError);
}

TEST_CASE("haar_orthonormal produces orthonormal frames") {
    Rng rng(17);
    const RealMatrix q = haar_orthonormal(12, 5, rng);
    CHECK((q.transpose() * q - RealMatrix::Identity(5, 5)).norm() <= 1e-12);
    CHECK_THROWS_AS(haar_orthonormal(3, 4, rng), InvalidInputError);
}

TEST_CASE("make_subspaces geometry") {
    SUBCASE("orthonormal bases with exact shared block") {
        SynthConfig cfg;
        cfg.m = 40;
        cfg.L = 4;
        cfg.d = 10;
        cfg.shared_dims = 3;
        cfg.seed = 11;
        const SubspaceModel model = make_subspaces(cfg);
        REQUIRE(model.num_subspaces() == 4);
        for (const RealMatrix& u : model.bases) {
            CHECK((u.transpose() * u - RealMatrix::Identity(10, 10)).norm() <= 1e-9);
            CHECK(u.leftCols(3) == model.bases[0].leftCols(3)); // identical, not approximate
        }
        // shared block forces the first p principal angles to zero
        const auto angles = principal_angles(model.bases[0], model.bases[1]);
        for (int i = 0; i < 3; ++i) CHECK(angles[static_cast<std::size_t>(i)] <= 1e-8);
    }

    SUBCASE("full sharing collapses every basis to one subspace") {
        SynthConfig cfg;
        cfg.m = 20;
        cfg.L = 3;
        cfg.d = 5;
        cfg.shared_dims = 5;
        cfg.seed = 12;
        const SubspaceModel model = make_subspaces(cfg);
        CHECK(affinity(model.bases[0], model.bases[1]) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(affinity(model.bases[1], model.bases[2]) == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("no sharing in a roomy ambient space keeps subspaces apart") {
        SynthConfig cfg;
        cfg.m = 60;
        cfg.L = 3;
        cfg.d = 4;
        cfg.shared_dims = 0;
        cfg.seed = 13;
        const SubspaceModel model = make_subspaces(cfg);
        const auto angles = principal_angles(model.bases[0], model.bases[1]);
        CHECK(angles.front() > 0.0);
        CHECK(affinity(model.bases[0], model.bases[1]) < 1.0);
    }

    SUBCASE("reference geometry keeps affinity at or above 1/sqrt(3)") {
        SynthConfig cfg; // m=120, L=8, d=30, shared_dims=10 defaults
        cfg.seed = 14;
        const SubspaceModel model = make_subspaces(cfg);
        for (Index k = 0; k < 8; ++k) {
            for (Index l = k + 1; l < 8; ++l) {
                CHECK(affinity(model.bases[static_cast<std::size_t>(k)],
                               model.bases[static_cast<std::size_t>(l)]) >=
                      1.0 / std::sqrt(3.0) - 1e-10);
            }
        }
    }

    SUBCASE("invalid geometry rejected") {
        SynthConfig cfg;
        cfg.m = 10;
        cfg.d = 12;
        CHECK_THROWS_AS(make_subspaces(cfg), InvalidInputError);
        cfg.d = 5;
        cfg.shared_dims = 6;
        CHECK_THROWS_AS(make_subspaces(cfg), InvalidInputError);
    }
}

TEST_CASE("make_dataset noiseless points live in their subspaces") {
    SynthConfig cfg;
    cfg.m = 25;
    cfg.L = 3;
    cfg.d = 4;
    cfg.shared_dims = 0;
    cfg.seed = 21;
    const SubspaceModel model = make_subspaces(cfg);
    const Dataset data = make_dataset(model, {6, 5, 7}, 0.0, 22);

    REQUIRE(data.size() == 18);
    REQUIRE(data.labels.has_value());
    for (Index c = 0; c < data.size(); ++c) {
        CHECK(std::abs(data.points.col(c).norm() - 1.0) <= 1e-10);
        const int l = (*data.labels)[static_cast<std::size_t>(c)];
        CHECK(span_residual(model.bases[static_cast<std::size_t>(l)],
                            data.points.col(c)) <= 1e-10);
    }
    CHECK(data.per_cluster_counts == std::vector<Index>{6, 5, 7});
}

TEST_CASE("make_dataset validates inputs and flags degenerate clusters") {
    SynthConfig cfg;
    cfg.m = 10;
    cfg.L = 2;
    cfg.d = 2;
    cfg.shared_dims = 0;
    cfg.seed = 23;
    const SubspaceModel model = make_subspaces(cfg);

    CHECK_THROWS_AS(make_dataset(model, {3, 0}, 0.0, 1), InvalidInputError);
    CHECK_THROWS_AS(make_dataset(model, {3}, 0.0, 1), InvalidInputError);
    CHECK_THROWS_AS(make_dataset(model, {3, 3}, -0.1, 1), InvalidInputError);

    const Dataset degenerate = make_dataset(model, {1, 3}, 0.0, 1);
    CHECK(degenerate.warnings.size() == 1);
}

TEST_CASE("noise norm concentrates around sqrt(total variance)") {
    // the generator draws e with per-coordinate variance sigma2/m, so
    // E||e||^2 = sigma2; for sigma2 = 0.3, ||e|| should concentrate near
    // sqrt(0.3) ~ 0.5477 within +-0.1 for at least 95% of draws
    const Index m = 120;
    const double sigma2 = 0.3;
    const double scale = std::sqrt(sigma2 / static_cast<double>(m));
    Rng rng(31);
    int within = 0;
    const int samples = 400;
    for (int s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (Index i = 0; i < m; ++i) {
            const double e = scale * rng.gaussian();
            norm2 += e * e;
        }
        const double norm = std::sqrt(norm2);
        if (std::abs(norm - std::sqrt(sigma2)) <= 0.1) ++within;
    }
    CHECK(within >= static_cast<int>(0.95 * samples));
}

TEST_CASE("noisy datasets stay unit norm and show the noise") {
    SynthConfig cfg;
    cfg.m = 120;
    cfg.L = 2;
    cfg.d = 10;
    cfg.shared_dims = 0;
    cfg.n_per_subspace = 40;
    cfg.noise_var = 0.3;
    cfg.seed = 32;
    SubspaceModel model;
    const Dataset data = synth_instance(cfg, &model);

    double mean_residual = 0.0;
    for (Index c = 0; c < data.size(); ++c) {
        CHECK(std::abs(data.points.col(c).norm() - 1.0) <= 1e-10);
        const int l = (*data.labels)[static_cast<std::size_t>(c)];
        mean_residual +=
            span_residual(model.bases[static_cast<std::size_t>(l)], data.points.col(c));
    }
    mean_residual /= static_cast<double>(data.size());
    CHECK(mean_residual > 0.2); // sigma2=0.3 noise is clearly visible
}

TEST_CASE("single-subspace Gram matrix respects the rank bound") {
    SynthConfig cfg;
    cfg.m = 12;
    cfg.L = 1;
    cfg.d = 2;
    cfg.shared_dims = 0;
    cfg.n_per_subspace = 5;
    cfg.seed = 33;
    const Dataset data = synth_instance(cfg);
    const RealMatrix gram = data.points.transpose() * data.points;
    CHECK(gram.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    Eigen::JacobiSVD<RealMatrix> svd(gram);
    CHECK(svd.singularValues()(2) <= 1e-10); // rank <= d = 2
}

TEST_CASE("identical configs give bit-identical datasets") {
    SynthConfig cfg;
    cfg.m = 30;
    cfg.L = 3;
    cfg.d = 5;
    cfg.shared_dims = 2;
    cfg.n_per_subspace = 8;
    cfg.noise_var = 0.2;
    cfg.seed = 77;
    const Dataset a = synth_instance(cfg);
    const Dataset b = synth_instance(cfg);
    CHECK(a.points == b.points);
    CHECK(*a.labels == *b.labels);
}
