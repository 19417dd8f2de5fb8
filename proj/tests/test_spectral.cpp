#include <doctest.h>

#include <cmath>
#include <numeric>

#include "unionclust/datagen.hpp"
#include "unionclust/eval.hpp"
#include "unionclust/spectral.hpp"

using namespace unionclust;

namespace {

AffinityGraph block_graph(const std::vector<Index>& sizes, double weight,
                          double cross_weight = 0.0) {
    Index n = std::accumulate(sizes.begin(), sizes.end(), Index{0});
    RealMatrix a = RealMatrix::Zero(n, n);
    Index offset = 0;
    for (Index size : sizes) {
        for (Index i = 0; i < size; ++i) {
            for (Index j = i + 1; j < size; ++j) {
                a(offset + i, offset + j) = weight;
                a(offset + j, offset + i) = weight;
            }
        }
        offset += size;
    }
    if (cross_weight > 0.0 && sizes.size() > 1) {
        a(0, sizes[0]) = cross_weight; // one weak edge between blocks 0 and 1
        a(sizes[0], 0) = cross_weight;
    }
    return AffinityGraph{std::move(a)};
}

std::vector<int> block_labels(const std::vector<Index>& sizes) {
    std::vector<int> labels;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        for (Index i = 0; i < sizes[b]; ++i) labels.push_back(static_cast<int>(b));
    }
    return labels;
}

} // namespace

TEST_CASE("normalized_laplacian of a two-node graph ignores the weight") {
    for (double w : {0.5, 1.0, 7.25}) {
        RealMatrix a = RealMatrix::Zero(2, 2);
        a(0, 1) = a(1, 0) = w;
        const RealMatrix lap = normalized_laplacian(AffinityGraph{a});
        CHECK(lap(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lap(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lap(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(lap(1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("isolated nodes keep a unit diagonal entry") {
    RealMatrix a = RealMatrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 2.0; // node 2 isolated
    const RealMatrix lap = normalized_laplacian(AffinityGraph{a});
    CHECK(lap(2, 2) == doctest::Approx(1.0));
    CHECK(lap(2, 0) == 0.0);
    CHECK(lap(2, 1) == 0.0);
    // isolated node counts as its own component in the graph sense
    CHECK(connected_components(AffinityGraph{a}).component_count == 2);
}

TEST_CASE("block graphs put one zero eigenvalue per block") {
    const AffinityGraph g = block_graph({3, 4, 2}, 1.0);
    const auto spectrum = symmetric_eigen(normalized_laplacian(g));
    int zeros = 0;
    for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
        if (std::abs(spectrum.eigenvalues(i)) <= 1e-10) ++zeros;
    }
    CHECK(zeros == 3);
    // spectrum of the normalized Laplacian stays within [0, 2]
    CHECK(spectrum.eigenvalues.minCoeff() >= -1e-10);
    CHECK(spectrum.eigenvalues.maxCoeff() <= 2.0 + 1e-10);
}

TEST_CASE("estimate_num_clusters in all three modes") {
    SpectralConfig cfg;
    RealVector spectrum(5);

    SUBCASE("zero count") {
        spectrum << 0, 0, 0, 0.8, 1.1;
        cfg.order_mode = OrderMode::zero_count;
        cfg.zero_eig_tol = 1e-8;
        const auto [l, used] = estimate_num_clusters(spectrum, cfg);
        CHECK(l == 3);
        CHECK(used == OrderMode::zero_count);
    }

    SUBCASE("zero count with no zeros is an estimation failure") {
        spectrum << 0.1, 0.2, 0.3, 0.8, 1.1;
        cfg.order_mode = OrderMode::zero_count;
        CHECK_THROWS_AS(estimate_num_clusters(spectrum, cfg), EstimationError);
        try {
            estimate_num_clusters(spectrum, cfg);
        } catch (const EstimationError& e) {
            CHECK(std::string(e.what()).find("eigengap") != std::string::npos);
        }
    }

    SUBCASE("eigengap picks the largest gap") {
        spectrum << 0, 0.01, 0.02, 0.9, 1.0;
        cfg.order_mode = OrderMode::eigengap;
        cfg.max_L_scan = 5;
        const auto [l, used] = estimate_num_clusters(spectrum, cfg);
        CHECK(l == 3); // gap 0.88 between positions 3 and 4
        CHECK(used == OrderMode::eigengap);
    }

    SUBCASE("given_L passes through") {
        spectrum << 0, 0.5, 0.6, 0.7, 0.8;
        cfg.order_mode = OrderMode::given_L;
        cfg.given_L = 8;
        const auto [l, used] = estimate_num_clusters(spectrum, cfg);
        CHECK(l == 8);
        CHECK(used == OrderMode::given_L);
    }

    SUBCASE("zero tolerance can scale with the spectrum size") {
        spectrum << 4e-8, 0.5, 0.6, 0.7, 0.8; // above 1e-8 but below 5 * 1e-8
        cfg.order_mode = OrderMode::zero_count;
        cfg.zero_eig_tol = 1e-8;
        CHECK_THROWS_AS(estimate_num_clusters(spectrum, cfg), EstimationError);
        cfg.scale_zero_tol_by_n = true;
        const auto [l, used] = estimate_num_clusters(spectrum, cfg);
        CHECK(l == 1);
    }
}

TEST_CASE("zero count matches connected components on block graphs") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(seed);
        std::vector<Index> sizes;
        const int blocks = 1 + static_cast<int>(rng.below(4));
        for (int b = 0; b < blocks; ++b) sizes.push_back(2 + static_cast<Index>(rng.below(5)));
        const AffinityGraph g = block_graph(sizes, 0.5 + rng.uniform01());

        SpectralConfig cfg;
        cfg.order_mode = OrderMode::zero_count;
        const auto spectrum = symmetric_eigen(normalized_laplacian(g));
        const auto [l, used] = estimate_num_clusters(spectrum.eigenvalues, cfg);
        CHECK(l == connected_components(g).component_count);
    }
}

TEST_CASE("spectral_embed_and_cluster separates ideal blocks") {
    SUBCASE("three disjoint blocks come back exactly") {
        const std::vector<Index> sizes{5, 7, 4};
        const AffinityGraph g = block_graph(sizes, 1.0);
        SpectralConfig cfg;
        cfg.seed = 3;
        const ClusteringResult r = spectral_embed_and_cluster(g, 3, cfg);
        CHECK(clustering_error(r.predicted_labels, block_labels(sizes)) == 0.0);
        CHECK(r.L_hat == 3);
        CHECK(r.kmeans_inertia == doctest::Approx(0.0).epsilon(1e-10));
    }

    SUBCASE("single complete graph is one cluster") {
        const AffinityGraph g = block_graph({6}, 1.0);
        SpectralConfig cfg;
        cfg.seed = 4;
        const ClusteringResult r = spectral_embed_and_cluster(g, 1, cfg);
        for (int l : r.predicted_labels) CHECK(l == 0);
    }

    SUBCASE("a weak cross edge does not move the cut") {
        const std::vector<Index> sizes{6, 6};
        const AffinityGraph g = block_graph(sizes, 1.0, 1e-3);
        SpectralConfig cfg;
        cfg.seed = 5;
        const ClusteringResult r = spectral_embed_and_cluster(g, 2, cfg);
        CHECK(clustering_error(r.predicted_labels, block_labels(sizes)) == 0.0);
    }

    CHECK_THROWS_AS(spectral_embed_and_cluster(block_graph({4}, 1.0), 0, SpectralConfig{}),
                    InvalidInputError);
    CHECK_THROWS_AS(spectral_embed_and_cluster(block_graph({4}, 1.0), 5, SpectralConfig{}),
                    InvalidInputError);
}

TEST_CASE("kmeans is deterministic and prefers better restarts") {
    RealMatrix pts(8, 2);
    pts << 0, 0, 0.1, 0, 0, 0.1, 0.1, 0.1, 5, 5, 5.1, 5, 5, 5.1, 5.1, 5.1;

    const KMeansResult a = kmeans(pts, 2, 5, 100, 99);
    const KMeansResult b = kmeans(pts, 2, 5, 100, 99);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);

    // two clear blobs: every restart should converge to the same partition
    CHECK(a.labels[0] == a.labels[1]);
    CHECK(a.labels[4] == a.labels[7]);
    CHECK(a.labels[0] != a.labels[4]);

    CHECK_THROWS_AS(kmeans(pts, 0, 1, 10, 1), InvalidInputError);
    CHECK_THROWS_AS(kmeans(pts, 9, 1, 10, 1), InvalidInputError);
}

TEST_CASE("full pipeline recovers noiseless disjoint subspaces") {
    SynthConfig cfg;
    cfg.m = 50;
    cfg.L = 3;
    cfg.d = 5;
    cfg.shared_dims = 0;
    cfg.n_per_subspace = 50;
    cfg.seed = 2024;
    const Dataset data = synth_instance(cfg);

    TscConfig tsc;
    tsc.mode = TscMode::modified;
    tsc.tau = 0.0;
    SpectralConfig spec_cfg;
    spec_cfg.order_mode = OrderMode::given_L;
    spec_cfg.given_L = 3;
    spec_cfg.seed = 1;

    const PipelineResult result = run_pipeline(data, tsc, spec_cfg);
    CHECK(clustering_error(result.clustering.predicted_labels, *data.labels) == 0.0);
    CHECK(result.clustering.estimator_used == OrderMode::given_L);

    // eigenvalues live in the normalized-Laplacian range
    CHECK(result.clustering.laplacian_eigenvalues.minCoeff() >= -1e-8);
    CHECK(result.clustering.laplacian_eigenvalues.maxCoeff() <= 2.0 + 1e-8);

    // with zero-eigenvalue counting the estimate matches the truth
    spec_cfg.order_mode = OrderMode::zero_count;
    const PipelineResult estimated = run_pipeline(data, tsc, spec_cfg);
    CHECK(estimated.clustering.L_hat == 3);
    CHECK(estimated.clustering.estimator_used == OrderMode::zero_count);
    CHECK(clustering_error(estimated.clustering.predicted_labels, *data.labels) == 0.0);
}

TEST_CASE("pipeline is equivariant under column permutation") {
    SynthConfig cfg;
    cfg.m = 30;
    cfg.L = 2;
    cfg.d = 4;
    cfg.shared_dims = 0;
    cfg.n_per_subspace = 20;
    cfg.noise_var = 0.05;
    cfg.seed = 88;
    const Dataset data = synth_instance(cfg);

    // deterministic permutation
    std::vector<Index> perm(static_cast<std::size_t>(data.size()));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(5);
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    Dataset shuffled = data;
    for (Index c = 0; c < data.size(); ++c) {
        shuffled.points.col(perm[static_cast<std::size_t>(c)]) = data.points.col(c);
        (*shuffled.labels)[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])] =
            (*data.labels)[static_cast<std::size_t>(c)];
    }

    TscConfig tsc;
    tsc.mode = TscMode::fixed_q;
    tsc.q = 6;
    SpectralConfig spec_cfg;
    spec_cfg.order_mode = OrderMode::given_L;
    spec_cfg.given_L = 2;
    spec_cfg.seed = 7;

    const auto base = run_pipeline(data, tsc, spec_cfg);
    const auto moved = run_pipeline(shuffled, tsc, spec_cfg);

    std::vector<int> base_moved(base.clustering.predicted_labels.size());
    for (std::size_t c = 0; c < base_moved.size(); ++c) {
        base_moved[static_cast<std::size_t>(perm[c])] = base.clustering.predicted_labels[c];
    }
    CHECK(clustering_error(moved.clustering.predicted_labels, base_moved) == 0.0);
}

TEST_CASE("edge pruning in the backend removes weak links") {
    // two clusters joined only by a weak mutual selection
    NeighborhoodResult a;
    a.point_index = 0;
    a.selected = {1};
    a.q_j = 1;
    a.coefficients = RealVector::Ones(1);
    NeighborhoodResult b = a;
    b.point_index = 1;
    b.selected = {0};
    NeighborhoodResult c = a;
    c.point_index = 2;
    c.selected = {3};
    NeighborhoodResult d = a;
    d.point_index = 3;
    d.selected = {2};
    // weak bridge 1 -> 2
    b.selected = {0, 2};
    b.q_j = 2;
    b.coefficients = RealVector(2);
    b.coefficients << 1.0, 1e-4;

    Dataset data;
    data.points = RealMatrix::Identity(4, 4);

    SpectralConfig cfg;
    cfg.order_mode = OrderMode::zero_count;
    cfg.seed = 1;
    const auto bridged = run_spectral_backend(data, {a, b, c, d}, cfg);
    CHECK(bridged.clustering.L_hat == 1); // bridge keeps everything connected

    cfg.edge_prune_threshold = 1e-3;
    const auto cut = run_spectral_backend(data, {a, b, c, d}, cfg);
    CHECK(cut.clustering.L_hat == 2);
    CHECK(connected_components(cut.graph).component_count == 2);
}

TEST_CASE("pipeline errors carry their stage") {
    Dataset data;
    data.points = RealMatrix::Identity(3, 3) * 2.0; // not unit norm
    try {
        run_pipeline(data, TscConfig{}, SpectralConfig{});
        CHECK(false);
    } catch (const InvalidInputError& e) {
        CHECK(std::string(e.what()).find("input") != std::string::npos);
    }

    // backend catches malformed neighborhood results at the graph stage
    NeighborhoodResult bad;
    bad.point_index = 0;
    bad.selected = {5};
    bad.q_j = 1;
    bad.coefficients = RealVector::Ones(1);
    Dataset two;
    two.points = RealMatrix::Identity(2, 2);
    try {
        run_spectral_backend(two, {bad, bad}, SpectralConfig{});
        CHECK(false);
    } catch (const InvalidInputError& e) {
        CHECK(std::string(e.what()).find("graph") != std::string::npos);
    }
}
