#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mstates/clustering.hpp"
#include "mstates/rng.hpp"

using namespace mstates;

namespace {

// Normalized kernel with `blocks` perfectly separated groups of size
// `block_size`: within-group similarity `w`, cross-group zero.
KernelMatrix block_kernel(int blocks, int block_size, double w = 1.0) {
    const int m = blocks * block_size;
    KernelMatrix K;
    K.h = 3;
    K.normalized = true;
    K.values = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        K.epoch_ids.push_back(i);
        K.values(i, i) = 1.0;
        for (int j = 0; j < m; ++j) {
            if (i != j && i / block_size == j / block_size) K.values(i, j) = w;
        }
    }
    return K;
}

std::vector<int> block_labels(int blocks, int block_size) {
    std::vector<int> labels;
    for (int b = 0; b < blocks; ++b) {
        labels.insert(labels.end(), static_cast<std::size_t>(block_size), b);
    }
    return labels;
}

Matrix blob_points(const std::vector<std::pair<double, double>>& centers, int per_center,
                   double noise, std::uint64_t seed) {
    auto rng = make_rng(seed);
    NormalSampler normal;
    Matrix points(static_cast<Index>(centers.size()) * per_center, 2);
    Index row = 0;
    for (const auto& [cx, cy] : centers) {
        for (int i = 0; i < per_center; ++i, ++row) {
            points(row, 0) = cx + noise * normal(rng);
            points(row, 1) = cy + noise * normal(rng);
        }
    }
    return points;
}

}  // namespace

TEST_CASE("normalized laplacian spectrum stays in [0, 2]") {
    auto rng = make_rng(404);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix A(9, 9);
    for (Index i = 0; i < 9; ++i) {
        for (Index j = i; j < 9; ++j) {
            const double v = i == j ? 0.0 : unif(rng);
            A(i, j) = v;
            A(j, i) = v;
        }
    }
    const Matrix L = normalized_laplacian<double>(A);
    CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(L, Eigen::EigenvaluesOnly);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-8);
    CHECK(solver.eigenvalues().maxCoeff() <= 2.0 + 1e-8);
}

TEST_CASE("normalized laplacian gives isolated nodes an identity row") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 1) = A(1, 0) = 1.0;  // node 2 is isolated
    const Matrix L = normalized_laplacian<double>(A);
    CHECK(L(2, 2) == 1.0);
    CHECK(L(2, 0) == 0.0);
    CHECK(L(2, 1) == 0.0);
    CHECK_THROWS_AS(normalized_laplacian<double>(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("eigengap counts disconnected blocks") {
    CHECK(eigengap_k(block_kernel(3, 4)) == 3);
    CHECK(eigengap_k(block_kernel(4, 3)) == 4);
    CHECK(eigengap_k(block_kernel(2, 7)) == 2);
    // One fully connected component: the first gap dominates.
    CHECK(eigengap_k(block_kernel(1, 12)) == 1);
}

TEST_CASE("eigengap is invariant under epoch reordering") {
    const KernelMatrix K = block_kernel(3, 4);
    std::vector<Index> perm(12);
    std::iota(perm.begin(), perm.end(), Index(0));
    auto rng = make_rng(7);
    for (Index i = 11; i > 0; --i) {
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[uniform_index(rng, static_cast<std::uint64_t>(i) + 1)]);
    }
    KernelMatrix shuffled = K;
    for (Index i = 0; i < 12; ++i) {
        for (Index j = 0; j < 12; ++j) {
            shuffled.values(i, j) = K.values(perm[static_cast<std::size_t>(i)],
                                             perm[static_cast<std::size_t>(j)]);
        }
        shuffled.epoch_ids[static_cast<std::size_t>(i)] =
            static_cast<int>(perm[static_cast<std::size_t>(i)]);
    }
    CHECK(eigengap_k(shuffled) == 3);
}

TEST_CASE("eigengap validates its input") {
    const KernelMatrix K = block_kernel(2, 3);  // m = 6
    CHECK_THROWS_AS(eigengap_k(K, 6), std::invalid_argument);
    CHECK_THROWS_AS(eigengap_k(K, 1), std::invalid_argument);
    KernelMatrix raw = K;
    raw.normalized = false;
    CHECK_THROWS_AS(eigengap_k(raw, 4), std::invalid_argument);
}

TEST_CASE("spectral embedding separates blocks onto orthogonal unit rows") {
    const KernelMatrix K = block_kernel(3, 4);
    const SpectralEmbedding emb = spectral_embed(K, 3);
    REQUIRE(emb.coordinates.rows() == 12);
    REQUIRE(emb.coordinates.cols() == 3);
    CHECK(emb.epoch_ids == K.epoch_ids);
    CHECK(emb.eigenvalues.size() == 12);
    CHECK(emb.eigenvalues.minCoeff() >= -1e-10);

    for (Index i = 0; i < 12; ++i) {
        CHECK(emb.coordinates.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (Index i = 0; i < 12; ++i) {
        for (Index j = 0; j < 12; ++j) {
            const double dot = emb.coordinates.row(i).dot(emb.coordinates.row(j));
            if (i / 4 == j / 4) {
                CHECK(dot == doctest::Approx(1.0).epsilon(1e-8));
            } else {
                CHECK(std::fabs(dot) < 1e-8);
            }
        }
    }
}

TEST_CASE("spectral embedding validates k") {
    const KernelMatrix K = block_kernel(2, 3);
    CHECK_THROWS_AS(spectral_embed(K, 1), std::invalid_argument);
    CHECK_THROWS_AS(spectral_embed(K, 6), std::invalid_argument);
}

TEST_CASE("embedding plus k-means recovers planted blocks") {
    const KernelMatrix K = block_kernel(3, 4, 0.8);
    const int k = eigengap_k(K);
    REQUIRE(k == 3);
    const SpectralEmbedding emb = spectral_embed(K, k);
    const StateAssignment assignment =
        kmeans(emb.coordinates, k, 99, 20, 1, &emb.epoch_ids);
    CHECK(adjusted_rand_index(assignment.state, block_labels(3, 4)) == doctest::Approx(1.0));
}

TEST_CASE("k-means puts coincident groups at zero inertia") {
    Matrix points(6, 2);
    points << 0, 0, 0, 0, 5, 5, 5, 5, -3, 4, -3, 4;
    const StateAssignment a = kmeans(points, 3, 42, 10);
    CHECK(a.inertia == 0.0);
    CHECK(a.k == 3);
    // Canonical ids follow first occurrence along the point order.
    CHECK(a.state == std::vector<int>{0, 0, 1, 1, 2, 2});
    CHECK(a.epoch_ids == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("k-means with one state groups everything") {
    const Matrix points = blob_points({{0, 0}, {8, 1}}, 5, 0.5, 3);
    const StateAssignment a = kmeans(points, 1, 7, 5);
    CHECK(a.k == 1);
    for (int s : a.state) CHECK(s == 0);
    // Inertia of a single cluster is the total squared deviation.
    const Matrix centered = points.rowwise() - points.colwise().mean();
    CHECK(a.inertia == doctest::Approx(centered.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("k-means separates well separated blobs") {
    const Matrix points = blob_points({{0, 0}, {10, 0}, {0, 10}}, 30, 0.1, 11);
    std::vector<int> planted;
    for (int b = 0; b < 3; ++b) planted.insert(planted.end(), 30, b);
    const StateAssignment a = kmeans(points, 3, 1234, 50);
    CHECK(adjusted_rand_index(a.state, planted) == doctest::Approx(1.0));
}

TEST_CASE("k-means is deterministic and schedule independent") {
    const Matrix points = blob_points({{0, 0}, {4, 0}, {0, 4}, {4, 4}}, 12, 0.8, 21);
    const StateAssignment serial = kmeans(points, 4, 555, 50, 1);
    const StateAssignment repeat = kmeans(points, 4, 555, 50, 1);
    const StateAssignment parallel = kmeans(points, 4, 555, 50, 4);
    CHECK(serial.state == repeat.state);
    CHECK(serial.inertia == repeat.inertia);
    CHECK(serial.state == parallel.state);
    CHECK(serial.inertia == parallel.inertia);
    // A different seed is allowed to differ; it must still be valid.
    const StateAssignment other = kmeans(points, 4, 556, 50, 1);
    CHECK(other.k == 4);
}

TEST_CASE("k-means validates its arguments") {
    const Matrix points = Matrix::Random(5, 2);
    CHECK_THROWS_AS(kmeans(points, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(points, 6, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(points, 2, 1, 0), std::invalid_argument);
    std::vector<int> short_ids = {1, 2};
    CHECK_THROWS_AS(kmeans(points, 2, 1, 5, 1, &short_ids), std::invalid_argument);
}

TEST_CASE("adjusted rand index reference values") {
    CHECK(adjusted_rand_index({0, 0, 1, 1}, {0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    CHECK(adjusted_rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(-0.5));
    CHECK(adjusted_rand_index({0, 0, 0, 0}, {0, 0, 0, 0}) == doctest::Approx(1.0));
    CHECK(adjusted_rand_index({0, 1, 2}, {5, 9, 7}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(adjusted_rand_index({0, 1}, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("state summaries pick medoids and average correlations") {
    StateAssignment assignment;
    assignment.epoch_ids = {10, 11, 12, 13, 14};
    assignment.state = {0, 0, 1, 1, 1};
    assignment.k = 2;

    DistanceMatrix distances;
    distances.epoch_ids = {10, 11, 12, 13, 14};
    distances.values = Matrix::Zero(5, 5);
    auto set = [&](int i, int j, double v) {
        distances.values(i, j) = v;
        distances.values(j, i) = v;
    };
    // State 0 members tie on total distance, so the lower id wins.
    set(0, 1, 1.0);
    // State 1: epoch 13 is strictly central.
    set(2, 3, 1.0);
    set(3, 4, 1.0);
    set(2, 4, 3.0);

    std::vector<CorrelationMatrix> matrices;
    const std::vector<double> offdiag = {0.2, 0.4, 0.6, 0.6, 0.9};
    for (int e = 0; e < 5; ++e) {
        CorrelationMatrix cm;
        cm.epoch.index = 10 + e;
        cm.coin_ids = {"aaa", "bbb"};
        cm.values = Matrix::Ones(2, 2);
        cm.values(0, 1) = cm.values(1, 0) = offdiag[static_cast<std::size_t>(e)];
        matrices.push_back(cm);
    }

    const StateReport report = summarize_states(assignment, distances, matrices);
    REQUIRE(report.states.size() == 2);
    CHECK(report.states[0].state == 0);
    CHECK(report.states[0].members == std::vector<int>{10, 11});
    CHECK(report.states[0].medoid == 10);
    CHECK(report.states[0].mean_correlation == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(report.states[1].members == std::vector<int>{12, 13, 14});
    CHECK(report.states[1].medoid == 13);
    CHECK(report.states[1].mean_correlation == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(assignment.medoid == std::vector<int>{10, 13});
}

TEST_CASE("state summaries reject inconsistent inputs") {
    StateAssignment assignment;
    assignment.epoch_ids = {0, 1};
    assignment.state = {0, 0};
    assignment.k = 2;  // state 1 has no members
    DistanceMatrix distances;
    distances.epoch_ids = {0, 1};
    distances.values = Matrix::Zero(2, 2);
    CHECK_THROWS(summarize_states(assignment, distances, {}));

    StateAssignment ragged;
    ragged.epoch_ids = {0, 1};
    ragged.state = {0};
    ragged.k = 1;
    CHECK_THROWS_AS(summarize_states(ragged, distances, {}), std::invalid_argument);
}
