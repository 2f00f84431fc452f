#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "vrjplab/errors.hpp"
#include "vrjplab/linalg.hpp"

namespace vrjplab::graphs {

/// One undirected edge, normalized so that u < v, with strictly positive
/// weight. The same container carries rate weights for jump processes and
/// initial crossing weights for reinforced walks.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

/// Finite connected weighted graph without loops or multiple edges.
/// Immutable after construction; all construction paths run the full
/// validation in build_graph, so instances can be shared freely across
/// worker threads.
class WeightedGraph {
 public:
  int n_vertices() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Neighbors of v as (other endpoint, weight) pairs, ascending by id.
  const std::vector<std::pair<int, double>>& neighbors(int v) const;
  /// Weight of edge {u,v}; 0.0 when the pair is not an edge.
  double weight(int u, int v) const;
  bool has_edge(int u, int v) const { return weight(u, v) > 0.0; }
  /// Sum of weights incident to v.
  double weighted_degree(int v) const;

  friend WeightedGraph build_graph(
      int n, const std::vector<std::tuple<int, int, double>>& weighted_edges);

 private:
  WeightedGraph() = default;
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

/// Result of merging a vertex subset into a single new vertex.
struct QuotientResult {
  WeightedGraph graph;
  /// Id of the merged vertex in the quotient. Always the largest id, so that
  /// downstream matrix blocks split cleanly into (kept | merged).
  int merged_vertex = 0;
  /// projection[old_vertex] = vertex id in the quotient graph.
  std::vector<int> projection;
};

/// Validates and builds a connected weighted graph.
/// Throws GraphError on: vertex ids out of range, self-loops, duplicate
/// edges, nonpositive weights, or a disconnected result.
WeightedGraph build_graph(
    int n, const std::vector<std::tuple<int, int, double>>& weighted_edges);

/// Merges a_set into one vertex x_A; weights from a kept vertex y into x_A
/// sum the original weights from y into the merged set, and edges inside
/// a_set are dropped. Kept vertices are renumbered in increasing id order,
/// and x_A receives the largest id.
/// Throws GraphError if a_set is empty or covers all vertices.
QuotientResult quotient(const WeightedGraph& g, const std::set<int>& a_set);

/// Quotient by the complement of the ball: merges {x : d(x0,x) >= radius}.
/// Throws GraphError if radius < 1 or the merged set would be empty
/// (radius exceeds the eccentricity of x0).
QuotientResult ball_quotient(const WeightedGraph& g, int x0, int radius);

/// Hypercubic box of side^d vertices with nearest-neighbor edges of
/// constant weight w. Row-major indexing: the last coordinate varies
/// fastest. Throws GraphError if side^d exceeds kMaxLatticeVertices.
WeightedGraph lattice_box(int d, int side, double w);

inline constexpr long long kMaxLatticeVertices = 1'000'000;

/// Dense symmetric weight matrix: W(i,j) = edge weight, zero elsewhere,
/// zero diagonal.
linalg::SymMatrix weight_matrix(const WeightedGraph& g);

/// BFS hop distances from source; every entry finite since graphs are
/// connected.
std::vector<int> bfs_distances(const WeightedGraph& g, int source);

/// Maximum BFS distance from v to any vertex.
int eccentricity(const WeightedGraph& g, int v);

/// Parses the edge-list text format: one `u v w` triple per line, blank
/// lines ignored, `#` starts a comment line. Vertex count is the largest
/// id + 1. Throws GraphError on malformed lines or invalid graphs.
WeightedGraph read_edge_list(std::istream& in);

/// Reads an edge-list file from disk. Throws GraphError if unreadable.
WeightedGraph load_graph_file(const std::string& path);

/// Writes the edge-list text format (one `u v w` line per edge).
void write_edge_list(const WeightedGraph& g, std::ostream& out);

}  // namespace vrjplab::graphs
