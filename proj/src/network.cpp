#include "mstates/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "mstates/stats.hpp"

namespace mstates {

using json = nlohmann::ordered_json;

MarketGraph build_graph(const CorrelationMatrix& matrix, double alpha, int T,
                        const std::string* label_override) {
    if (T < 4) {
        throw std::invalid_argument("build_graph: T must be >= 4, the null has no tail otherwise");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("build_graph: alpha must lie in (0, 1)");
    }
    // The null is calibrated for raw coefficients. Power-mapped input
    // would silently shift every p-value.
    if (matrix.q_applied != 1.0) {
        throw std::invalid_argument("build_graph: raw (q_applied == 1) coefficients required");
    }
    const Index K = matrix.values.rows();
    if (matrix.values.cols() != K) throw std::invalid_argument("build_graph: matrix must be square");
    for (Index j = 0; j < K; ++j) {
        if (std::fabs(matrix.values(j, j) - 1.0) > 1e-12) {
            throw std::invalid_argument("build_graph: diagonal must be 1");
        }
        for (Index i = 0; i < j; ++i) {
            if (std::fabs(matrix.values(i, j) - matrix.values(j, i)) > 1e-12) {
                throw std::invalid_argument("build_graph: matrix must be symmetric");
            }
        }
    }

    MarketGraph g;
    g.epoch = matrix.epoch;
    g.alpha = alpha;
    g.T_used = T;
    g.nodes.reserve(static_cast<std::size_t>(K));
    for (Index i = 0; i < K; ++i) {
        GraphNode node;
        node.id = matrix.coin_ids[static_cast<std::size_t>(i)];
        node.label = label_override != nullptr ? *label_override : node.id;
        g.nodes.push_back(std::move(node));
    }

    if (K < 2) return g;
    const double m = static_cast<double>(K) * static_cast<double>(K - 1) / 2.0;
    const double crit = critical_abs_correlation(alpha / m, T);
    for (Index j = 0; j < K; ++j) {
        for (Index i = 0; i < j; ++i) {
            if (std::fabs(matrix.values(i, j)) > crit) {
                g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    // (i < j) pairs ascending by (i, j) for deterministic serialization.
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

GraphMetrics graph_metrics(const MarketGraph& graph) {
    const Index K = static_cast<Index>(graph.nodes.size());
    GraphMetrics metrics;
    metrics.edge_count = static_cast<Index>(graph.edges.size());
    const double m = static_cast<double>(K) * static_cast<double>(K - 1) / 2.0;
    metrics.density = m > 0 ? static_cast<double>(metrics.edge_count) / m : 0.0;

    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(K),
                                       std::vector<bool>(static_cast<std::size_t>(K), false));
    std::vector<Index> degree(static_cast<std::size_t>(K), 0);
    for (const auto& [i, j] : graph.edges) {
        adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
        ++degree[static_cast<std::size_t>(i)];
        ++degree[static_cast<std::size_t>(j)];
    }

    std::int64_t triangles = 0;
    for (const auto& [i, j] : graph.edges) {
        for (Index v = j + 1; v < K; ++v) {
            if (adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] &&
                adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)]) {
                ++triangles;
            }
        }
    }
    std::int64_t triples = 0;
    for (Index v = 0; v < K; ++v) {
        triples += static_cast<std::int64_t>(degree[static_cast<std::size_t>(v)]) *
                   (degree[static_cast<std::size_t>(v)] - 1) / 2;
    }
    metrics.clustering = triples > 0 ? 3.0 * static_cast<double>(triangles) /
                                           static_cast<double>(triples)
                                     : 0.0;
    return metrics;
}

std::string graph_to_json(const MarketGraph& graph) {
    json nodes = json::array();
    for (const auto& node : graph.nodes) {
        nodes.push_back(json{{"id", node.id}, {"label", node.label}});
    }
    json edges = json::array();
    for (const auto& [i, j] : graph.edges) {
        edges.push_back(json::array({graph.nodes[static_cast<std::size_t>(i)].id,
                                     graph.nodes[static_cast<std::size_t>(j)].id}));
    }
    json doc{{"epoch", graph.epoch.index},
             {"start_date", format_iso_date(graph.epoch.start_date)},
             {"end_date", format_iso_date(graph.epoch.end_date)},
             {"nodes", std::move(nodes)},
             {"edges", std::move(edges)},
             {"alpha", graph.alpha},
             {"T", graph.T_used}};
    return doc.dump(2) + "\n";
}

MarketGraph graph_from_json(const std::string& text) {
    const json doc = json::parse(text);
    MarketGraph g;
    g.epoch.index = doc.at("epoch").get<int>();
    g.epoch.start_date = parse_iso_date(doc.at("start_date").get<std::string>());
    g.epoch.end_date = parse_iso_date(doc.at("end_date").get<std::string>());
    g.alpha = doc.at("alpha").get<double>();
    g.T_used = doc.at("T").get<int>();
    g.epoch.length = g.T_used;

    std::unordered_map<std::string, int> index_of;
    for (const auto& node : doc.at("nodes")) {
        GraphNode n;
        n.id = node.at("id").get<std::string>();
        n.label = node.at("label").get<std::string>();
        index_of.emplace(n.id, static_cast<int>(g.nodes.size()));
        g.nodes.push_back(std::move(n));
    }
    for (const auto& edge : doc.at("edges")) {
        const int i = index_of.at(edge.at(0).get<std::string>());
        const int j = index_of.at(edge.at(1).get<std::string>());
        g.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

std::string graph_to_dot(const MarketGraph& graph) {
    std::string out = "graph epoch_" + std::to_string(graph.epoch.index) + " {\n";
    for (const auto& node : graph.nodes) {
        out += "  \"" + node.id + "\" [label=\"" + node.label + "\"];\n";
    }
    for (const auto& [i, j] : graph.edges) {
        out += "  \"" + graph.nodes[static_cast<std::size_t>(i)].id + "\" -- \"" +
               graph.nodes[static_cast<std::size_t>(j)].id + "\";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace mstates
