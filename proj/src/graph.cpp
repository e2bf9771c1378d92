#include "bilap/graph.hpp"

#include <numeric>
#include <set>
#include <string>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

std::string edge_str(const Edge& e) {
    return "(" + std::to_string(e.source) + "," + std::to_string(e.target) + ")";
}

}  // namespace

Graph::Graph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
    if (vertex_count_ < 1)
        throw ValidationError("IndexOutOfRange", "vertex count must be positive");
    degrees_.assign(vertex_count_, 0);
    adj_.assign(vertex_count_, std::vector<bool>(vertex_count_, false));
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.source < 0 || e.source >= vertex_count_ || e.target < 0 ||
            e.target >= vertex_count_)
            throw ValidationError("IndexOutOfRange",
                                  "edge " + std::to_string(i) + " " + edge_str(e) +
                                      " references a vertex outside 0.." +
                                      std::to_string(vertex_count_ - 1));
        if (e.source == e.target)
            throw ValidationError("LoopEdge", "edge " + std::to_string(i) + " " +
                                                  edge_str(e) + " is a loop");
        auto key = std::minmax(e.source, e.target);
        if (!seen.insert(key).second)
            throw ValidationError("DuplicateEdge", "edge " + std::to_string(i) + " " +
                                                       edge_str(e) + " repeats an edge");
        degrees_[e.source]++;
        degrees_[e.target]++;
        adj_[e.source][e.target] = true;
        adj_[e.target][e.source] = true;
    }
    // connectivity by BFS from vertex 0
    std::vector<bool> reached(vertex_count_, false);
    std::vector<int> stack{0};
    reached[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < vertex_count_; ++w) {
            if (adj_[v][w] && !reached[w]) {
                reached[w] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    if (count != vertex_count_)
        throw ValidationError("Disconnected", "graph is not connected (" +
                                                  std::to_string(count) + " of " +
                                                  std::to_string(vertex_count_) +
                                                  " vertices reachable from 0)");
}

bool Graph::adjacent(int v, int w) const { return adj_[v][w]; }

int Graph::common_neighbors(int v, int w) const {
    int n = 0;
    for (int z = 0; z < vertex_count_; ++z)
        if (adj_[v][z] && adj_[w][z]) ++n;
    return n;
}

bool Graph::is_complete() const {
    return edge_count() == vertex_count_ * (vertex_count_ - 1) / 2;
}

Eigen::MatrixXi Graph::incidence_matrix() const {
    Eigen::MatrixXi inc = Eigen::MatrixXi::Zero(vertex_count_, edge_count());
    for (int e = 0; e < edge_count(); ++e) {
        inc(edges_[e].source, e) = -1;
        inc(edges_[e].target, e) = 1;
    }
    return inc;
}

Graph preset_graph(GraphKind kind, int n) {
    const int min_n = (kind == GraphKind::cycle || kind == GraphKind::complete) ? 3 : 2;
    if (n < min_n)
        throw ValidationError("SizeTooSmall",
                              "preset requires n >= " + std::to_string(min_n));
    std::vector<Edge> edges;
    switch (kind) {
        case GraphKind::path:
            for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
            return Graph(n, edges);
        case GraphKind::cycle:
            for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
            edges.push_back({n - 1, 0});
            return Graph(n, edges);
        case GraphKind::complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
            return Graph(n, edges);
        case GraphKind::star:
            for (int i = 1; i <= n; ++i) edges.push_back({0, i});
            return Graph(n + 1, edges);
        case GraphKind::flower:
            for (int k = 0; k < n; ++k) {
                edges.push_back({0, 2 * k + 1});
                edges.push_back({2 * k + 1, 2 * k + 2});
                edges.push_back({0, 2 * k + 2});
            }
            return Graph(2 * n + 1, edges);
    }
    throw ValidationError("SizeTooSmall", "unknown preset kind");
}

MetricGraph::MetricGraph(Graph graph, std::vector<double> lengths)
    : graph_(std::move(graph)), lengths_(std::move(lengths)) {
    if (static_cast<int>(lengths_.size()) != graph_.edge_count())
        throw ValidationError("LengthCountMismatch",
                              "expected " + std::to_string(graph_.edge_count()) +
                                  " lengths, got " + std::to_string(lengths_.size()));
    for (std::size_t i = 0; i < lengths_.size(); ++i)
        if (!(lengths_[i] > 0.0))
            throw ValidationError("NonpositiveLength",
                                  "edge " + std::to_string(i) + " has length " +
                                      std::to_string(lengths_[i]));
}

double MetricGraph::total_length() const {
    return std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
}

MetricGraph equilateral(const Graph& graph, double length) {
    return MetricGraph(graph, std::vector<double>(graph.edge_count(), length));
}

namespace {

constexpr int kEnumerationCap = 7;

bool mask_connected(int n, const std::vector<std::pair<int, int>>& pairs,
                    std::uint64_t mask) {
    // union-find over vertices touched by the selected edges
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    int components = n;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!(mask >> k & 1)) continue;
        int a = find(pairs[k].first), b = find(pairs[k].second);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

}  // namespace

void enumerate_connected_graphs(int n, const std::function<void(const Graph&)>& visit) {
    if (n < 1 || n > kEnumerationCap)
        throw ValidationError("SizeCapExceeded",
                              "enumeration supports 1 <= n <= " +
                                  std::to_string(kEnumerationCap));
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
    const std::uint64_t total = 1ull << pairs.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (!mask_connected(n, pairs, mask)) continue;
        std::vector<Edge> edges;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (mask >> k & 1) edges.push_back({pairs[k].first, pairs[k].second});
        visit(Graph(n, std::move(edges)));
    }
}

std::uint64_t connected_graph_count(int n) {
    std::uint64_t count = 0;
    enumerate_connected_graphs(n, [&](const Graph&) { ++count; });
    return count;
}

}  // namespace bilap
