#include "vrjplab/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "vrjplab/stats.hpp"

namespace vrjplab::graphs {

const std::vector<std::pair<int, double>>& WeightedGraph::neighbors(
    int v) const {
  if (v < 0 || v >= n_) throw GraphError("neighbors: vertex out of range");
  return adj_[v];
}

double WeightedGraph::weight(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_)
    throw GraphError("weight: vertex out of range");
  if (u == v) return 0.0;
  const auto& row = adj_[u];
  auto it = std::lower_bound(
      row.begin(), row.end(), v,
      [](const std::pair<int, double>& p, int key) { return p.first < key; });
  if (it != row.end() && it->first == v) return it->second;
  return 0.0;
}

double WeightedGraph::weighted_degree(int v) const {
  double s = 0.0;
  for (const auto& [u, w] : neighbors(v)) {
    (void)u;
    s += w;
  }
  return s;
}

WeightedGraph build_graph(
    int n, const std::vector<std::tuple<int, int, double>>& weighted_edges) {
  if (n < 1) throw GraphError("build_graph: need at least one vertex");
  WeightedGraph g;
  g.n_ = n;
  g.adj_.resize(n);
  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b, w] : weighted_edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw GraphError("build_graph: vertex id out of range");
    if (a == b) throw GraphError("build_graph: self-loop not allowed");
    if (!(w > 0.0) || !std::isfinite(w))
      throw GraphError("build_graph: edge weight must be positive and finite");
    const int u = std::min(a, b), v = std::max(a, b);
    if (!seen.insert({u, v}).second)
      throw GraphError("build_graph: duplicate edge");
    g.edges_.push_back({u, v, w});
    g.adj_[u].push_back({v, w});
    g.adj_[v].push_back({u, w});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.u, x.v) < std::tie(y.u, y.v);
  });
  for (auto& row : g.adj_) std::sort(row.begin(), row.end());
  // connectivity
  std::vector<char> vis(n, 0);
  std::queue<int> q;
  q.push(0);
  vis[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& [v, w] : g.adj_[u]) {
      (void)w;
      if (!vis[v]) {
        vis[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  if (reached != n) throw GraphError("build_graph: graph is not connected");
  return g;
}

QuotientResult quotient(const WeightedGraph& g, const std::set<int>& a_set) {
  const int n = g.n_vertices();
  if (a_set.empty()) throw GraphError("quotient: merged set is empty");
  for (int v : a_set)
    if (v < 0 || v >= n) throw GraphError("quotient: vertex out of range");
  const int kept = n - static_cast<int>(a_set.size());
  if (kept == 0) throw GraphError("quotient: merged set covers all vertices");

  std::vector<int> proj(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v)
    if (!a_set.count(v)) proj[v] = next++;
  const int merged = kept;  // largest id in the quotient
  for (int v : a_set) proj[v] = merged;

  std::map<std::pair<int, int>, double> acc;
  for (const Edge& e : g.edges()) {
    const int pu = proj[e.u], pv = proj[e.v];
    if (pu == pv) continue;  // edge inside the merged set
    const auto key = std::minmax(pu, pv);
    acc[{key.first, key.second}] += e.w;
  }
  std::vector<std::tuple<int, int, double>> edges;
  edges.reserve(acc.size());
  for (const auto& [k, w] : acc) edges.emplace_back(k.first, k.second, w);

  return QuotientResult{build_graph(kept + 1, edges), merged,
                        std::move(proj)};
}

QuotientResult ball_quotient(const WeightedGraph& g, int x0, int radius) {
  if (radius < 1) throw GraphError("ball_quotient: radius must be >= 1");
  const std::vector<int> dist = bfs_distances(g, x0);
  std::set<int> far;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (dist[v] >= radius) far.insert(v);
  if (far.empty())
    throw GraphError("ball_quotient: ball of this radius covers the graph");
  return quotient(g, far);
}

WeightedGraph lattice_box(int d, int side, double w) {
  if (d < 1) throw GraphError("lattice_box: dimension must be >= 1");
  if (side < 2) throw GraphError("lattice_box: side must be >= 2");
  if (!(w > 0.0)) throw GraphError("lattice_box: weight must be positive");
  long long count = 1;
  for (int i = 0; i < d; ++i) {
    count *= side;
    if (count > kMaxLatticeVertices)
      throw GraphError("lattice_box: vertex count exceeds maximum");
  }
  const int n = static_cast<int>(count);
  // Row-major: vertex id = ((c0*side + c1)*side + c2)*... ; the stride of
  // coordinate k is side^(d-1-k), so the last coordinate varies fastest.
  std::vector<long long> stride(d, 1);
  for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * side;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<int> coord(d, 0);
  for (int v = 0; v < n; ++v) {
    for (int k = 0; k < d; ++k)
      if (coord[k] + 1 < side)
        edges.emplace_back(v, v + static_cast<int>(stride[k]), w);
    // increment mixed-radix coordinate vector
    for (int k = d - 1; k >= 0; --k) {
      if (++coord[k] < side) break;
      coord[k] = 0;
    }
  }
  return build_graph(n, edges);
}

linalg::SymMatrix weight_matrix(const WeightedGraph& g) {
  linalg::SymMatrix m(g.n_vertices());
  for (const Edge& e : g.edges()) m.set(e.u, e.v, e.w);
  return m;
}

std::vector<int> bfs_distances(const WeightedGraph& g, int source) {
  const int n = g.n_vertices();
  if (source < 0 || source >= n)
    throw GraphError("bfs_distances: source out of range");
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& [v, w] : g.neighbors(u)) {
      (void)w;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

int eccentricity(const WeightedGraph& g, int v) {
  const std::vector<int> dist = bfs_distances(g, v);
  return *std::max_element(dist.begin(), dist.end());
}

WeightedGraph read_edge_list(std::istream& in) {
  std::vector<std::tuple<int, int, double>> edges;
  int max_id = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u, v;
    double w;
    if (!(ls >> u >> v >> w))
      throw GraphError("edge list line " + std::to_string(line_no) +
                       ": expected `u v w`");
    std::string rest;
    if (ls >> rest)
      throw GraphError("edge list line " + std::to_string(line_no) +
                       ": trailing tokens");
    if (u < 0 || v < 0 || u > kMaxLatticeVertices || v > kMaxLatticeVertices)
      throw GraphError("edge list line " + std::to_string(line_no) +
                       ": vertex id out of range");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v), w);
    max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
  }
  if (edges.empty()) throw GraphError("edge list: no edges found");
  return build_graph(max_id + 1, edges);
}

WeightedGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file: " + path);
  return read_edge_list(in);
}

void write_edge_list(const WeightedGraph& g, std::ostream& out) {
  for (const Edge& e : g.edges())
    out << e.u << ' ' << e.v << ' ' << fmt_g17(e.w) << '\n';
}

}  // namespace vrjplab::graphs
