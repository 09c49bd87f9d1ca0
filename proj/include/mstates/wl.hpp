#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mstates/core.hpp"

namespace mstates {

// Node-labeled undirected graph in the shape refinement wants: string
// labels plus sorted neighbor lists, no self-loops.
struct LabeledGraph {
    std::vector<std::string> labels;
    std::vector<std::vector<int>> adjacency;

    Index n_nodes() const { return static_cast<Index>(labels.size()); }
};

// Canonical injective compression of labels, shared across the whole
// graph collection: identical augmented labels compress to the same id
// no matter which graph (or iteration) they appear in. Initial labels
// and refined labels live in disjoint key namespaces, so a coin id can
// never collide with a refined label's encoding.
class LabelDictionary {
public:
    // Interns an initial (iteration-0) label.
    int intern_initial(const std::string& label);
    // Interns a refined label: (old id, sorted multiset of neighbor ids).
    int intern_refined(int own, const std::vector<int>& sorted_neighbors);

    int size() const { return static_cast<int>(keys_.size()); }
    const std::string& key(int id) const { return keys_[static_cast<std::size_t>(id)]; }

private:
    int intern(std::string key);

    std::unordered_map<std::string, int> ids_;
    std::vector<std::string> keys_;
};

// Label-count histograms for iterations 0..h. Kernels are dot products
// over the concatenation; per-iteration counts each sum to the node
// count. Ordered maps keep accumulation order deterministic.
struct FeatureHistogram {
    std::vector<std::map<int, int>> per_iteration;
};

struct KernelMatrix {
    std::vector<int> epoch_ids;
    Matrix values;
    int h = 0;
    bool normalized = false;
};

struct DistanceMatrix {
    std::vector<int> epoch_ids;
    Matrix values;
};

// One refinement sweep: each node's new label is the compression of
// (own label, sorted multiset of neighbor labels). The multiset is
// canonicalized by interned id, which identifies the same multisets as
// a lexicographic sort of the label strings would.
LabeledGraph wl_refine(const LabeledGraph& graph, LabelDictionary& dict);

// Histograms of iterations 0..h. All graphs that will ever be compared
// must share `dict`.
FeatureHistogram wl_feature_map(const LabeledGraph& graph, int h, LabelDictionary& dict);

// Dot product of concatenated histograms. Counts are integers, so the
// result is exact and independent of summation order.
double histogram_dot(const FeatureHistogram& a, const FeatureHistogram& b);
double wl_kernel(const LabeledGraph& g1, const LabeledGraph& g2, int h, LabelDictionary& dict);

// All-pairs kernel over a graph collection. The dictionary pre-pass is
// sequential in (epoch order, node order); pair dot products then run
// embarrassingly parallel. With normalize, K^(x,y) = K/sqrt(Kxx*Kyy).
// Throws if any graph has zero nodes (its self-kernel would be 0).
KernelMatrix kernel_matrix(const std::vector<LabeledGraph>& graphs, int h, bool normalize,
                           int jobs = 1, const std::vector<int>* epoch_ids = nullptr);

// Feature-space Euclidean distance d = sqrt(Kxx + Kyy - 2Kxy). Requires
// a PSD kernel; squared distances below -1e-9 signal a broken kernel
// and throw, tiny negatives clamp to 0.
DistanceMatrix kernel_distance(const KernelMatrix& K);

}  // namespace mstates
