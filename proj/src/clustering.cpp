#include "mstates/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mstates/parallel.hpp"
#include "mstates/rng.hpp"

namespace mstates {

template <typename Scalar>
Mat<Scalar> normalized_laplacian(const Mat<Scalar>& affinity) {
    const Index m = affinity.rows();
    if (affinity.cols() != m) throw std::invalid_argument("normalized_laplacian: square input required");

    Vec<Scalar> degree = affinity.rowwise().sum();
    Vec<Scalar> inv_sqrt(m);
    for (Index i = 0; i < m; ++i) {
        const Scalar d = degree(i) > Scalar(0) ? degree(i) : Scalar(1);
        inv_sqrt(i) = Scalar(1) / std::sqrt(d);
    }
    Mat<Scalar> L = -(inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal());
    for (Index i = 0; i < m; ++i) L(i, i) += Scalar(1);
    // Exact symmetry so the eigensolver sees a clean self-adjoint input.
    L = ((L + L.transpose()) / Scalar(2)).eval();
    return L;
}

template Mat<double> normalized_laplacian<double>(const Mat<double>&);
template Mat<float> normalized_laplacian<float>(const Mat<float>&);

namespace {

Matrix laplacian_of_kernel(const KernelMatrix& K) {
    if (!K.normalized) {
        throw std::invalid_argument("eigengap/spectral_embed: normalized kernel required");
    }
    Matrix affinity = K.values;
    affinity.diagonal().setZero();
    return normalized_laplacian<double>(affinity);
}

}  // namespace

int eigengap_k(const KernelMatrix& K, int k_max) {
    const Index m = K.values.rows();
    if (k_max < 2) throw std::invalid_argument("eigengap_k: k_max must be >= 2");
    if (m <= k_max) throw std::invalid_argument("eigengap_k: need more epochs than k_max");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian_of_kernel(K), Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();  // ascending
    if (!ev.allFinite()) throw std::runtime_error("eigengap_k: non-finite eigenvalues");

    int best_k = 1;
    double best_gap = -1.0;
    for (int i = 1; i <= k_max; ++i) {
        const double gap = ev(i) - ev(i - 1);
        if (gap > best_gap) {
            best_gap = gap;
            best_k = i;
        }
    }
    return best_k;
}

SpectralEmbedding spectral_embed(const KernelMatrix& K, int k) {
    const Index m = K.values.rows();
    if (k < 2 || k >= m) throw std::invalid_argument("spectral_embed: need 2 <= k < m");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian_of_kernel(K));
    if (!solver.eigenvalues().allFinite()) {
        throw std::runtime_error("spectral_embed: non-finite eigenvalues");
    }

    SpectralEmbedding out;
    out.epoch_ids = K.epoch_ids;
    out.eigenvalues = solver.eigenvalues();
    out.coordinates = solver.eigenvectors().leftCols(k);
    for (Index i = 0; i < m; ++i) {
        const double norm = out.coordinates.row(i).norm();
        if (!(norm > 0.0)) {
            throw std::runtime_error("spectral_embed: zero embedding row for epoch " +
                                     std::to_string(out.epoch_ids[static_cast<std::size_t>(i)]));
        }
        out.coordinates.row(i) /= norm;
    }
    return out;
}

namespace {

struct LloydResult {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

int nearest_centroid(const Matrix& points, const Matrix& centroids, Index p) {
    int best = 0;
    double best_d = (points.row(p) - centroids.row(0)).squaredNorm();
    for (Index c = 1; c < centroids.rows(); ++c) {
        const double d = (points.row(p) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

// k-means++ seeding: first centroid uniform, then proportional to the
// squared distance to the nearest chosen centroid.
Matrix seed_centroids(const Matrix& points, int k, std::mt19937_64& rng) {
    const Index m = points.rows();
    Matrix centroids(k, points.cols());
    centroids.row(0) = points.row(static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(m))));

    Vector d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Index chosen;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double cumulative = 0.0;
            chosen = m - 1;
            for (Index p = 0; p < m; ++p) {
                cumulative += d2(p);
                if (cumulative > target) {
                    chosen = p;
                    break;
                }
            }
        } else {
            // All remaining mass is zero: points coincide with chosen
            // centroids, any pick is equivalent.
            chosen = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(m)));
        }
        centroids.row(c) = points.row(chosen);
        d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

LloydResult lloyd(const Matrix& points, int k, std::mt19937_64&& rng) {
    const Index m = points.rows();
    Matrix centroids = seed_centroids(points, k, rng);

    LloydResult result;
    result.labels.assign(static_cast<std::size_t>(m), 0);
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int round = 0; round < 300; ++round) {
        for (Index p = 0; p < m; ++p) {
            result.labels[static_cast<std::size_t>(p)] = nearest_centroid(points, centroids, p);
        }

        // Empty-cluster repair: promote the point farthest from its
        // centroid; one pass per empty cluster, ascending cluster id.
        for (int c = 0; c < k; ++c) {
            if (std::count(result.labels.begin(), result.labels.end(), c) > 0) continue;
            Index farthest = 0;
            double far_d = -1.0;
            for (Index p = 0; p < m; ++p) {
                const int owner = result.labels[static_cast<std::size_t>(p)];
                const double d = (points.row(p) - centroids.row(owner)).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    farthest = p;
                }
            }
            centroids.row(c) = points.row(farthest);
            result.labels[static_cast<std::size_t>(farthest)] = c;
        }

        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index p = 0; p < m; ++p) {
            sums.row(result.labels[static_cast<std::size_t>(p)]) += points.row(p);
            ++counts[static_cast<std::size_t>(result.labels[static_cast<std::size_t>(p)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            }
        }

        double inertia = 0.0;
        for (Index p = 0; p < m; ++p) {
            inertia += (points.row(p) -
                        centroids.row(result.labels[static_cast<std::size_t>(p)]))
                           .squaredNorm();
        }
        result.inertia = inertia;
        if (std::isfinite(prev_inertia) &&
            std::fabs(prev_inertia - inertia) < 1e-10 * std::max(prev_inertia, 1e-300)) {
            break;
        }
        prev_inertia = inertia;
    }
    return result;
}

}  // namespace

StateAssignment kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts, int jobs,
                       const std::vector<int>* epoch_ids) {
    const Index m = points.rows();
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (k > m) throw std::invalid_argument("kmeans: k exceeds the number of points");
    if (restarts < 1) throw std::invalid_argument("kmeans: need at least 1 restart");

    std::vector<LloydResult> runs(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), jobs, [&](std::size_t r) {
        runs[r] = lloyd(points, k, make_rng(seed, "kmeans/restart/" + std::to_string(r)));
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].inertia < runs[best].inertia) best = r;
    }

    StateAssignment out;
    out.k = k;
    out.inertia = runs[best].inertia;
    if (epoch_ids != nullptr) {
        if (static_cast<Index>(epoch_ids->size()) != m) {
            throw std::invalid_argument("kmeans: epoch id count mismatch");
        }
        out.epoch_ids = *epoch_ids;
    } else {
        out.epoch_ids.resize(static_cast<std::size_t>(m));
        for (Index i = 0; i < m; ++i) out.epoch_ids[static_cast<std::size_t>(i)] = static_cast<int>(i);
    }

    // Canonical state ids: first occurrence along the epoch order gets
    // the next free id, so reports are stable across label permutations.
    std::map<int, int> canonical;
    out.state.reserve(static_cast<std::size_t>(m));
    for (int raw : runs[best].labels) {
        const auto [it, inserted] = canonical.emplace(raw, static_cast<int>(canonical.size()));
        out.state.push_back(it->second);
    }
    return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: size mismatch");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;

    std::map<std::pair<int, int>, std::int64_t> joint;
    std::map<int, std::int64_t> count_a, count_b;
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[{a[i], b[i]}];
        ++count_a[a[i]];
        ++count_b[b[i]];
    }
    auto choose2 = [](std::int64_t x) { return static_cast<double>(x) * (x - 1) / 2.0; };

    double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, c] : joint) sum_joint += choose2(c);
    for (const auto& [key, c] : count_a) sum_a += choose2(c);
    for (const auto& [key, c] : count_b) sum_b += choose2(c);

    const double pairs = choose2(static_cast<std::int64_t>(n));
    const double expected = sum_a * sum_b / pairs;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (sum_joint - expected) / (max_index - expected);
}

StateReport summarize_states(StateAssignment& assignment, const DistanceMatrix& distances,
                             const std::vector<CorrelationMatrix>& matrices) {
    const std::size_t m = assignment.epoch_ids.size();
    if (assignment.state.size() != m) throw std::invalid_argument("summarize_states: ragged assignment");
    if (static_cast<std::size_t>(distances.values.rows()) != m) {
        throw std::invalid_argument("summarize_states: distance matrix size mismatch");
    }

    // Position of each epoch id in the distance matrix and the stats.
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < distances.epoch_ids.size(); ++i) {
        pos[distances.epoch_ids[i]] = i;
    }
    std::map<int, double> mean_corr;
    for (const CorrelationMatrix& cm : matrices) {
        const Index K = cm.values.rows();
        double sum = 0.0;
        for (Index j = 0; j < K; ++j) {
            for (Index i = 0; i < j; ++i) sum += cm.values(i, j);
        }
        const double n_pairs = static_cast<double>(K) * static_cast<double>(K - 1) / 2.0;
        mean_corr[cm.epoch.index] = n_pairs > 0 ? sum / n_pairs : 0.0;
    }

    StateReport report;
    assignment.medoid.assign(static_cast<std::size_t>(assignment.k), -1);
    for (int s = 0; s < assignment.k; ++s) {
        StateSummary summary;
        summary.state = s;
        for (std::size_t i = 0; i < m; ++i) {
            if (assignment.state[i] == s) summary.members.push_back(assignment.epoch_ids[i]);
        }
        if (summary.members.empty()) {
            throw std::runtime_error("summarize_states: state " + std::to_string(s) + " is empty");
        }

        double best_total = std::numeric_limits<double>::infinity();
        int best_epoch = summary.members.front();
        for (int candidate : summary.members) {
            double total = 0.0;
            for (int other : summary.members) {
                total += distances.values(static_cast<Index>(pos.at(candidate)),
                                          static_cast<Index>(pos.at(other)));
            }
            // Strict < keeps the lower epoch id on ties; members ascend.
            if (total < best_total) {
                best_total = total;
                best_epoch = candidate;
            }
        }
        summary.medoid = best_epoch;
        assignment.medoid[static_cast<std::size_t>(s)] = best_epoch;

        double corr_sum = 0.0;
        std::size_t with_stats = 0;
        for (int member : summary.members) {
            const auto it = mean_corr.find(member);
            if (it == mean_corr.end()) continue;
            corr_sum += it->second;
            ++with_stats;
        }
        summary.mean_correlation = with_stats > 0 ? corr_sum / static_cast<double>(with_stats) : 0.0;
        report.states.push_back(std::move(summary));
    }
    return report;
}

}  // namespace mstates
