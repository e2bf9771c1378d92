#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace bilap {

struct Edge {
    int source = 0;
    int target = 0;
};

/// Finite simple connected graph with a fixed orientation. The edge list
/// order defines both the edge indexing and the orientation; everything
/// downstream (incidence matrix, trace conventions) inherits it.
class Graph {
public:
    /// Validates on construction: indices in range, no loops, no repeated
    /// unordered endpoint pairs, connected.
    Graph(int vertex_count, std::vector<Edge> edges);

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    int degree(int v) const { return degrees_[v]; }
    const std::vector<int>& degrees() const { return degrees_; }
    bool adjacent(int v, int w) const;
    /// |N_v ∩ N_w|: number of common neighbors.
    int common_neighbors(int v, int w) const;
    bool is_complete() const;

    /// V x E signed incidence matrix: -1 at the source of each edge, +1 at
    /// the target. Columns sum to zero.
    Eigen::MatrixXi incidence_matrix() const;

private:
    int vertex_count_;
    std::vector<Edge> edges_;
    std::vector<int> degrees_;
    std::vector<std::vector<bool>> adj_;
};

enum class GraphKind { path, cycle, complete, star, flower };

/// Canonical small-graph presets.
///   path(n):     vertices 0..n-1, edges (i, i+1)
///   cycle(n):    path edges plus the closing edge (0, n-1)
///   complete(n): edges (i, j) for i < j in lexicographic order
///   star(n):     center 0, leaves 1..n, edges (0, i)
///   flower(n):   n triangle petals glued at center 0; petal k adds
///                vertices 2k+1, 2k+2 and edges (0,2k+1), (2k+1,2k+2), (0,2k+2)
/// Requires n >= 2 (n >= 3 for cycle and complete).
Graph preset_graph(GraphKind kind, int n);

/// Combinatorial graph equipped with strictly positive edge lengths; edge
/// e is identified with the interval [0, length(e)].
class MetricGraph {
public:
    MetricGraph(Graph graph, std::vector<double> lengths);

    const Graph& graph() const { return graph_; }
    double length(int e) const { return lengths_[e]; }
    const std::vector<double>& lengths() const { return lengths_; }
    double total_length() const;

    int vertex_count() const { return graph_.vertex_count(); }
    int edge_count() const { return graph_.edge_count(); }

private:
    Graph graph_;
    std::vector<double> lengths_;
};

/// Equip a graph with unit edge lengths.
MetricGraph equilateral(const Graph& graph, double length = 1.0);

/// Streams every connected simple graph on n labeled vertices exactly once,
/// in the deterministic order induced by lexicographic edge-subset masks.
/// Hard cap n <= 7 to bound runtime. Enumeration is over labeled graphs;
/// no isomorphism reduction.
void enumerate_connected_graphs(int n, const std::function<void(const Graph&)>& visit);

/// Number of connected labeled graphs on n vertices (same cap).
std::uint64_t connected_graph_count(int n);

}  // namespace bilap
