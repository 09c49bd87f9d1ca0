#include "mstates/wl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "mstates/parallel.hpp"

namespace mstates {

int LabelDictionary::intern(std::string key) {
    const auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(keys_.size());
    ids_.emplace(key, id);
    keys_.push_back(std::move(key));
    return id;
}

int LabelDictionary::intern_initial(const std::string& label) {
    return intern("=" + label);
}

int LabelDictionary::intern_refined(int own, const std::vector<int>& sorted_neighbors) {
    // Refined keys start with a digit and initial keys with '=', so the
    // two namespaces cannot collide whatever the coin ids look like.
    std::string key = std::to_string(own);
    key.push_back('|');
    for (std::size_t i = 0; i < sorted_neighbors.size(); ++i) {
        if (i) key.push_back(',');
        key += std::to_string(sorted_neighbors[i]);
    }
    return intern(std::move(key));
}

namespace {

std::vector<int> initial_ids(const LabeledGraph& graph, LabelDictionary& dict) {
    std::vector<int> ids(graph.labels.size());
    for (std::size_t v = 0; v < graph.labels.size(); ++v) {
        ids[v] = dict.intern_initial(graph.labels[v]);
    }
    return ids;
}

std::vector<int> refine_ids(const LabeledGraph& graph, const std::vector<int>& ids,
                            LabelDictionary& dict) {
    std::vector<int> next(ids.size());
    std::vector<int> neighbors;
    for (std::size_t v = 0; v < ids.size(); ++v) {
        neighbors.clear();
        for (int u : graph.adjacency[v]) neighbors.push_back(ids[static_cast<std::size_t>(u)]);
        std::sort(neighbors.begin(), neighbors.end());
        next[v] = dict.intern_refined(ids[v], neighbors);
    }
    return next;
}

std::map<int, int> count_ids(const std::vector<int>& ids) {
    std::map<int, int> hist;
    for (int id : ids) ++hist[id];
    return hist;
}

void check_graph(const LabeledGraph& graph) {
    const int n = static_cast<int>(graph.labels.size());
    if (graph.adjacency.size() != graph.labels.size()) {
        throw std::invalid_argument("LabeledGraph: adjacency/label size mismatch");
    }
    for (int v = 0; v < n; ++v) {
        for (int u : graph.adjacency[static_cast<std::size_t>(v)]) {
            if (u < 0 || u >= n) throw std::invalid_argument("LabeledGraph: neighbor out of range");
            if (u == v) throw std::invalid_argument("LabeledGraph: self-loop");
        }
    }
}

}  // namespace

LabeledGraph wl_refine(const LabeledGraph& graph, LabelDictionary& dict) {
    check_graph(graph);
    const std::vector<int> ids = refine_ids(graph, initial_ids(graph, dict), dict);
    LabeledGraph out;
    out.adjacency = graph.adjacency;
    out.labels.reserve(ids.size());
    for (int id : ids) out.labels.push_back(dict.key(id));
    return out;
}

FeatureHistogram wl_feature_map(const LabeledGraph& graph, int h, LabelDictionary& dict) {
    if (h < 0) throw std::invalid_argument("wl_feature_map: h must be >= 0");
    check_graph(graph);

    FeatureHistogram features;
    features.per_iteration.reserve(static_cast<std::size_t>(h) + 1);
    std::vector<int> ids = initial_ids(graph, dict);
    features.per_iteration.push_back(count_ids(ids));
    for (int it = 1; it <= h; ++it) {
        ids = refine_ids(graph, ids, dict);
        features.per_iteration.push_back(count_ids(ids));
    }
    return features;
}

double histogram_dot(const FeatureHistogram& a, const FeatureHistogram& b) {
    const std::size_t depth = std::min(a.per_iteration.size(), b.per_iteration.size());
    std::int64_t dot = 0;
    for (std::size_t it = 0; it < depth; ++it) {
        const auto& ma = a.per_iteration[it];
        const auto& mb = b.per_iteration[it];
        auto ia = ma.begin();
        auto ib = mb.begin();
        while (ia != ma.end() && ib != mb.end()) {
            if (ia->first < ib->first) {
                ++ia;
            } else if (ib->first < ia->first) {
                ++ib;
            } else {
                dot += static_cast<std::int64_t>(ia->second) * ib->second;
                ++ia;
                ++ib;
            }
        }
    }
    return static_cast<double>(dot);
}

double wl_kernel(const LabeledGraph& g1, const LabeledGraph& g2, int h, LabelDictionary& dict) {
    const FeatureHistogram f1 = wl_feature_map(g1, h, dict);
    const FeatureHistogram f2 = wl_feature_map(g2, h, dict);
    return histogram_dot(f1, f2);
}

KernelMatrix kernel_matrix(const std::vector<LabeledGraph>& graphs, int h, bool normalize,
                           int jobs, const std::vector<int>* epoch_ids) {
    const Index m = static_cast<Index>(graphs.size());
    if (m < 2) throw std::invalid_argument("kernel_matrix: need at least 2 graphs");
    for (Index g = 0; g < m; ++g) {
        if (graphs[static_cast<std::size_t>(g)].n_nodes() == 0) {
            throw std::invalid_argument("kernel_matrix: graph " + std::to_string(g) +
                                        " has no nodes, self-kernel would be 0");
        }
    }

    // Sequential dictionary pre-pass in collection order, so compressed
    // ids never depend on the parallel schedule below.
    LabelDictionary dict;
    std::vector<FeatureHistogram> features;
    features.reserve(static_cast<std::size_t>(m));
    for (const LabeledGraph& g : graphs) features.push_back(wl_feature_map(g, h, dict));

    KernelMatrix K;
    K.h = h;
    K.normalized = normalize;
    if (epoch_ids != nullptr) {
        if (static_cast<Index>(epoch_ids->size()) != m) {
            throw std::invalid_argument("kernel_matrix: epoch id count mismatch");
        }
        K.epoch_ids = *epoch_ids;
    } else {
        K.epoch_ids.resize(static_cast<std::size_t>(m));
        for (Index g = 0; g < m; ++g) K.epoch_ids[static_cast<std::size_t>(g)] = static_cast<int>(g);
    }

    K.values.resize(m, m);
    // Pair (i <= j) enumeration, flattened for the worker pool. Every
    // worker writes disjoint cells, so the result is schedule-free.
    std::vector<std::pair<Index, Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(m * (m + 1) / 2));
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i <= j; ++i) pairs.emplace_back(i, j);
    }
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = histogram_dot(features[static_cast<std::size_t>(i)],
                                       features[static_cast<std::size_t>(j)]);
        K.values(i, j) = v;
        K.values(j, i) = v;
    });

    if (normalize) {
        Vector diag = K.values.diagonal();
        for (Index i = 0; i < m; ++i) {
            K.values(i, i) = 1.0;
            for (Index j = 0; j < i; ++j) {
                const double v = K.values(i, j) / std::sqrt(diag(i) * diag(j));
                K.values(i, j) = v;
                K.values(j, i) = v;
            }
        }
    }
    return K;
}

DistanceMatrix kernel_distance(const KernelMatrix& K) {
    const Index m = K.values.rows();
    // PSD gate: a kernel that lost positive semidefiniteness produces
    // imaginary distances, better to fail loudly here.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(K.values, Eigen::EigenvaluesOnly);
    const double max_eig = solver.eigenvalues().maxCoeff();
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -1e-8 * std::max(max_eig, 1.0)) {
        throw std::runtime_error("kernel_distance: kernel is not PSD within tolerance");
    }

    DistanceMatrix D;
    D.epoch_ids = K.epoch_ids;
    D.values.resize(m, m);
    for (Index j = 0; j < m; ++j) {
        D.values(j, j) = 0.0;
        for (Index i = 0; i < j; ++i) {
            const double sq = K.values(i, i) + K.values(j, j) - 2.0 * K.values(i, j);
            if (sq < -1e-9) {
                throw std::runtime_error("kernel_distance: negative squared distance " +
                                         std::to_string(sq));
            }
            const double d = std::sqrt(std::max(sq, 0.0));
            D.values(i, j) = d;
            D.values(j, i) = d;
        }
    }
    return D;
}

}  // namespace mstates
