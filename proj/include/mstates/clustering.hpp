#pragma once

#include <cstdint>
#include <vector>

#include "mstates/correlation.hpp"
#include "mstates/wl.hpp"

namespace mstates {

// Rows of `coordinates` are unit-normalized spectral coordinates, one
// per epoch; `eigenvalues` carries the full ascending Laplacian
// spectrum (all values in [0, 2] up to 1e-8).
struct SpectralEmbedding {
    std::vector<int> epoch_ids;
    Matrix coordinates;
    Vector eigenvalues;
};

// Epoch -> market-state labels. States are non-empty; ids are
// canonicalized by first occurrence along the epoch order. Medoids are
// filled in by summarize_states (they need kernel distances).
struct StateAssignment {
    std::vector<int> epoch_ids;
    std::vector<int> state;
    int k = 0;
    double inertia = 0.0;
    std::vector<int> medoid;  // per-state epoch id; empty until summarized
};

struct StateSummary {
    int state = 0;
    std::vector<int> members;       // epoch ids
    int medoid = 0;                 // epoch id minimizing intra-state distance
    double mean_correlation = 0.0;  // mean of members' mean-correlation stats
};

struct StateReport {
    std::vector<StateSummary> states;
};

// Degree-normalized symmetric Laplacian L = I - D^{-1/2} A D^{-1/2} of a
// non-negative affinity. Isolated rows take degree 1 by convention, so
// their Laplacian row is the identity row.
template <typename Scalar>
Mat<Scalar> normalized_laplacian(const Mat<Scalar>& affinity);

// Eigengap heuristic on the normalized Laplacian of K^ with its
// diagonal zeroed: ascending eigenvalues l1 <= ... <= lm, returns the
// i in [1, k_max] maximizing l_{i+1} - l_i, ties toward smaller i.
// Requires a normalized kernel and m > k_max >= 2.
int eigengap_k(const KernelMatrix& K, int k_max = 10);

// Eigenvectors of the k smallest Laplacian eigenvalues, rows normalized
// to unit length. A zero row aborts, naming the epoch.
SpectralEmbedding spectral_embed(const KernelMatrix& K, int k);

// Seeded k-means++ with `restarts` restarts, Lloyd iterations to a
// 1e-10 relative inertia change or 300 rounds, empty clusters repaired
// by promoting the point farthest from its centroid. Winner is the
// lexicographic minimum of (inertia, restart index), so parallel
// restart evaluation cannot change the result.
StateAssignment kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 50,
                       int jobs = 1, const std::vector<int>* epoch_ids = nullptr);

// Chance-corrected partition agreement in [-1, 1].
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Per-state membership, medoid (total intra-state kernel distance,
// ties toward the lower epoch id), and mean of the members' mean
// correlations. Also backfills assignment.medoid.
StateReport summarize_states(StateAssignment& assignment, const DistanceMatrix& distances,
                             const std::vector<CorrelationMatrix>& matrices);

}  // namespace mstates
