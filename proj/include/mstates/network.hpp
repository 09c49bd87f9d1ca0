#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mstates/correlation.hpp"

namespace mstates {

struct GraphNode {
    std::string id;
    std::string label;
};

// Undirected labeled graph of significantly correlated coins for one
// epoch. Edges are index pairs (i < j) into `nodes`, ascending.
struct MarketGraph {
    Epoch epoch;
    std::vector<GraphNode> nodes;
    std::vector<std::pair<int, int>> edges;
    double alpha = 0.0;  // family-wise significance level used
    int T_used = 0;      // sample count behind the null
};

struct GraphMetrics {
    Index edge_count = 0;
    double density = 0.0;     // |E| / (K(K-1)/2)
    double clustering = 0.0;  // 3 * triangles / connected triples
};

// Keeps edge (i, j) iff the exact two-sided white-noise p-value of the
// raw coefficient magnitude falls below alpha / m, m = K(K-1)/2
// (Bonferroni). Equivalently |C_ij| must exceed
// critical_abs_correlation(alpha / m, T). |C_ij| = 1 always passes.
// Node labels default to the coin ids; pass label_override to ablate
// label information (every node gets the same label).
// Requires a symmetric unit-diagonal matrix and T >= 4.
MarketGraph build_graph(const CorrelationMatrix& matrix, double alpha, int T,
                        const std::string* label_override = nullptr);

GraphMetrics graph_metrics(const MarketGraph& graph);

// Stage serialization: {nodes:[{id,label}], edges:[[id,id]...], alpha, T}
// plus the epoch frame. Round-trips through read_graph_json exactly.
std::string graph_to_json(const MarketGraph& graph);
MarketGraph graph_from_json(const std::string& text);
std::string graph_to_dot(const MarketGraph& graph);

}  // namespace mstates
