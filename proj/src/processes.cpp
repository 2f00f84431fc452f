#include "vrjplab/processes.hpp"

#include <algorithm>
#include <cmath>

#include "vrjplab/distributions.hpp"
#include "vrjplab/errors.hpp"

namespace vrjplab::processes {

namespace {

// Maps each (vertex, neighbor-slot) to the index of that edge in g.edges(),
// so per-edge state lookups stay O(1) inside the step loop.
std::vector<std::vector<std::size_t>> edge_slots(
    const graphs::WeightedGraph& g) {
  const int n = g.n_vertices();
  std::vector<std::vector<std::size_t>> slots(n);
  std::vector<std::map<int, std::size_t>> by_pair(n);
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    by_pair[edges[e].u][edges[e].v] = e;
    by_pair[edges[e].v][edges[e].u] = e;
  }
  for (int v = 0; v < n; ++v) {
    const auto& nb = g.neighbors(v);
    slots[v].resize(nb.size());
    for (std::size_t s = 0; s < nb.size(); ++s)
      slots[v][s] = by_pair[v].at(nb[s].first);
  }
  return slots;
}

void check_edge_vector(const graphs::WeightedGraph& g,
                       const std::vector<double>& vals, const char* what) {
  if (vals.size() != g.edges().size())
    throw DimensionError(std::string(what) + ": edge vector length mismatch");
  for (double v : vals)
    if (!(v > 0.0))
      throw ConfigError(std::string(what) + ": entries must be positive");
}

void check_vertex(const graphs::WeightedGraph& g, int x0) {
  if (x0 < 0 || x0 >= g.n_vertices())
    throw ConfigError("start vertex out of range");
}

std::vector<double> edge_weights_of(const graphs::WeightedGraph& g) {
  std::vector<double> w;
  w.reserve(g.edges().size());
  for (const auto& e : g.edges()) w.push_back(e.w);
  return w;
}

}  // namespace

Trajectory simulate_errw(const graphs::WeightedGraph& g,
                         const std::vector<double>& a_edges, int x0,
                         std::uint64_t steps, Rng& rng) {
  check_edge_vector(g, a_edges, "simulate_errw");
  check_vertex(g, x0);
  const auto slots = edge_slots(g);
  std::vector<std::uint64_t> crossings(g.edges().size(), 0);
  Trajectory t;
  t.vertices.reserve(steps + 1);
  t.vertices.push_back(x0);
  int cur = x0;
  std::vector<double> cum;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const auto& nb = g.neighbors(cur);
    cum.assign(nb.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      total += a_edges[slots[cur][i]] +
               static_cast<double>(crossings[slots[cur][i]]);
      cum[i] = total;
    }
    const double r = rng.uniform() * total;
    std::size_t pick = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
    if (pick >= nb.size()) pick = nb.size() - 1;
    ++crossings[slots[cur][pick]];
    cur = nb[pick].first;
    t.vertices.push_back(cur);
  }
  return t;
}

Trajectory simulate_errw(const graphs::WeightedGraph& g, int x0,
                         std::uint64_t steps, Rng& rng) {
  return simulate_errw(g, edge_weights_of(g), x0, steps, rng);
}

Trajectory simulate_vrjp(const graphs::WeightedGraph& g,
                         const std::vector<double>& w_edges, int x0,
                         std::uint64_t n_jumps, Rng& rng) {
  check_edge_vector(g, w_edges, "simulate_vrjp");
  check_vertex(g, x0);
  const auto slots = edge_slots(g);
  Trajectory t;
  t.vertices.reserve(n_jumps + 1);
  t.jump_times.reserve(n_jumps);
  t.local_times.assign(g.n_vertices(), 0.0);
  t.vertices.push_back(x0);
  int cur = x0;
  double now = 0.0;
  std::vector<double> cum;
  for (std::uint64_t s = 0; s < n_jumps; ++s) {
    const auto& nb = g.neighbors(cur);
    cum.assign(nb.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      // Holding times of the possible targets are frozen while the walker
      // sits at cur, so each rate is constant until the next jump.
      total += w_edges[slots[cur][i]] * (1.0 + t.local_times[nb[i].first]);
      cum[i] = total;
    }
    const double sojourn = rng.exponential(total);
    t.local_times[cur] += sojourn;
    now += sojourn;
    const double r = rng.uniform() * total;
    std::size_t pick = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
    if (pick >= nb.size()) pick = nb.size() - 1;
    cur = nb[pick].first;
    t.vertices.push_back(cur);
    t.jump_times.push_back(now);
  }
  return t;
}

Trajectory simulate_vrjp(const graphs::WeightedGraph& g, int x0,
                         std::uint64_t n_jumps, Rng& rng) {
  return simulate_vrjp(g, edge_weights_of(g), x0, n_jumps, rng);
}

Trajectory errw_via_vrjp(const graphs::WeightedGraph& g,
                         const std::vector<double>& a_edges, int x0,
                         std::uint64_t steps, Rng& rng) {
  check_edge_vector(g, a_edges, "errw_via_vrjp");
  std::vector<double> w(a_edges.size());
  for (std::size_t e = 0; e < a_edges.size(); ++e)
    w[e] = sample_gamma(a_edges[e], 1.0, rng);
  Trajectory full = simulate_vrjp(g, w, x0, steps, rng);
  Trajectory t;
  t.vertices = std::move(full.vertices);
  if (t.vertices.size() > steps + 1) t.vertices.resize(steps + 1);
  return t;
}

Trajectory errw_via_vrjp(const graphs::WeightedGraph& g, int x0,
                         std::uint64_t steps, Rng& rng) {
  return errw_via_vrjp(g, edge_weights_of(g), x0, steps, rng);
}

std::vector<double> conductances_from_beta(const betafield::GreenMatrix& green,
                                           const graphs::WeightedGraph& g,
                                           int x0) {
  check_vertex(g, x0);
  if (green.m.dim() != g.n_vertices())
    throw DimensionError("conductances_from_beta: dimension mismatch");
  std::vector<double> c;
  c.reserve(g.edges().size());
  for (const auto& e : g.edges())
    c.push_back(e.w * green.m(x0, e.u) * green.m(x0, e.v));
  return c;
}

Trajectory rw_conductances(const graphs::WeightedGraph& g,
                           const std::vector<double>& c_edges, int x0,
                           std::uint64_t steps, Rng& rng) {
  check_edge_vector(g, c_edges, "rw_conductances");
  check_vertex(g, x0);
  const auto slots = edge_slots(g);
  Trajectory t;
  t.vertices.reserve(steps + 1);
  t.vertices.push_back(x0);
  int cur = x0;
  std::vector<double> cum;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const auto& nb = g.neighbors(cur);
    cum.assign(nb.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      total += c_edges[slots[cur][i]];
      cum[i] = total;
    }
    const double r = rng.uniform() * total;
    std::size_t pick = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
    if (pick >= nb.size()) pick = nb.size() - 1;
    cur = nb[pick].first;
    t.vertices.push_back(cur);
  }
  return t;
}

std::vector<std::pair<int, double>> errw_transition(
    const graphs::WeightedGraph& g, const std::vector<double>& a_edges,
    const std::vector<std::uint64_t>& crossings, int x) {
  check_edge_vector(g, a_edges, "errw_transition");
  if (crossings.size() != g.edges().size())
    throw DimensionError("errw_transition: crossings length mismatch");
  check_vertex(g, x);
  const auto slots = edge_slots(g);
  const auto& nb = g.neighbors(x);
  double total = 0.0;
  std::vector<std::pair<int, double>> out(nb.size());
  for (std::size_t i = 0; i < nb.size(); ++i) {
    const double v =
        a_edges[slots[x][i]] + static_cast<double>(crossings[slots[x][i]]);
    out[i] = {nb[i].first, v};
    total += v;
  }
  for (auto& p : out) p.second /= total;
  return out;
}

std::string path_key(const Trajectory& t, std::uint64_t k) {
  std::string key;
  if (t.vertices.empty()) return key;
  const std::uint64_t last = std::min<std::uint64_t>(k, t.vertices.size() - 1);
  for (std::uint64_t i = 0; i <= last; ++i) {
    if (i > 0) key += '-';
    key += std::to_string(t.vertices[i]);
  }
  return key;
}

std::map<std::string, std::uint64_t> path_distribution(
    const std::function<Trajectory(Rng&)>& sampler, std::uint64_t k,
    std::uint64_t n, Rng& rng) {
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Trajectory t = sampler(rng);
    ++counts[path_key(t, k)];
  }
  return counts;
}

}  // namespace vrjplab::processes
