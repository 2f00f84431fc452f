#include "vrjplab/electrical.hpp"

#include <cmath>
#include <numbers>

#include "vrjplab/distributions.hpp"
#include "vrjplab/errors.hpp"
#include "vrjplab/linalg.hpp"

namespace vrjplab::electrical {

PotentialSolution solve_potential(const graphs::WeightedGraph& g,
                                  const std::vector<double>& c_edges, int x0,
                                  int delta) {
  const int n = g.n_vertices();
  if (c_edges.size() != g.edges().size())
    throw DimensionError("solve_potential: conductance vector length mismatch");
  for (double c : c_edges)
    if (!(c > 0.0))
      throw ConfigError("solve_potential: conductances must be positive");
  if (x0 < 0 || x0 >= n || delta < 0 || delta >= n)
    throw ConfigError("solve_potential: vertex out of range");
  if (x0 == delta)
    throw ConfigError("solve_potential: x0 and delta must differ");

  // Dense conductance lookup and weighted degrees.
  linalg::SymMatrix c(n);
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    c.set(edges[e].u, edges[e].v, c_edges[e]);
  std::vector<double> deg(n, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    deg[edges[e].u] += c_edges[e];
    deg[edges[e].v] += c_edges[e];
  }

  std::vector<int> interior;
  std::vector<int> pos(n, -1);
  for (int v = 0; v < n; ++v)
    if (v != x0 && v != delta) {
      pos[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }

  std::vector<double> V(n, 0.0);
  V[x0] = 1.0;
  const int m = static_cast<int>(interior.size());
  if (m > 0) {
    linalg::SymMatrix lap(m);
    std::vector<double> rhs(m, 0.0);
    for (int a = 0; a < m; ++a) {
      const int va = interior[a];
      lap.set(a, a, deg[va]);
      rhs[a] = c(va, x0);  // V(x0) = 1 contribution; V(delta) = 0
      for (int b = 0; b < a; ++b) {
        const int vb = interior[b];
        const double cab = c(va, vb);
        if (cab != 0.0) lap.set(a, b, -cab);
      }
    }
    const std::vector<double> sol = linalg::solve_pd(lap, rhs);
    for (int a = 0; a < m; ++a) V[interior[a]] = sol[a];
  }

  PotentialSolution out;
  out.potential = V;
  double energy = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double d = V[edges[e].u] - V[edges[e].v];
    energy += c_edges[e] * d * d;
  }
  out.energy = energy;
  double flow = 0.0;
  for (const auto& [y, w] : g.neighbors(x0)) {
    (void)w;
    flow += c(x0, y) * (V[x0] - V[y]);
  }
  out.c_eff = flow;
  double resid = 0.0;
  for (int v : interior) {
    double net = 0.0;
    for (const auto& [y, w] : g.neighbors(v)) {
      (void)w;
      net += c(v, y) * (V[v] - V[y]);
    }
    resid = std::max(resid, std::fabs(net));
  }
  out.harmonic_residual = resid;
  return out;
}

double effective_conductance(const graphs::WeightedGraph& g,
                             const std::vector<double>& c_edges, int x0,
                             int delta) {
  return solve_potential(g, c_edges, x0, delta).c_eff;
}

double effective_conductance(const graphs::WeightedGraph& g, int x0,
                             int delta) {
  std::vector<double> c;
  c.reserve(g.edges().size());
  for (const auto& e : g.edges()) c.push_back(e.w);
  return effective_conductance(g, c, x0, delta);
}

double effective_weight(const betafield::GreenMatrix& green, int x, int y) {
  const int n = green.m.dim();
  if (x < 0 || x >= n || y < 0 || y >= n)
    throw ConfigError("effective_weight: vertex out of range");
  if (x == y) throw ConfigError("effective_weight: x and y must differ");
  const double gxy = green.m(x, y);
  const double den = green.m(x, x) * green.m(y, y) - gxy * gxy;
  if (!(den > 0.0))
    throw Error("effective_weight: nonpositive denominator (numerical failure)");
  return gxy / den;
}

double effective_weight_schur(const betafield::HMatrix& h, int x, int y) {
  const int n = h.m.dim();
  if (x < 0 || x >= n || y < 0 || y >= n)
    throw ConfigError("effective_weight_schur: vertex out of range");
  if (x == y) throw ConfigError("effective_weight_schur: x and y must differ");
  const double w_xy = -h.m(x, y);
  if (n == 2) return w_xy;
  linalg::SymMatrix rest(n - 2);
  std::vector<double> bx(n - 2), by(n - 2);
  std::vector<int> keep;
  keep.reserve(n - 2);
  for (int v = 0; v < n; ++v)
    if (v != x && v != y) keep.push_back(v);
  for (int a = 0; a < n - 2; ++a) {
    bx[a] = -h.m(keep[a], x);
    by[a] = -h.m(keep[a], y);
    for (int b = 0; b <= a; ++b) rest.set(a, b, h.m(keep[a], keep[b]));
  }
  return w_xy + linalg::quad_form_pd_ext(rest, bx, by);
}

double effective_weight_from_h(const betafield::HMatrix& h, int x, int y) {
  const int n = h.m.dim();
  if (x < 0 || x >= n || y < 0 || y >= n)
    throw ConfigError("effective_weight_from_h: vertex out of range");
  if (x == y) throw ConfigError("effective_weight_from_h: x and y must differ");
  const linalg::GreenPair g = linalg::green_pair_pd(h.m, x, y);
  if (!(g.det2 > 0.0))
    throw Error(
        "effective_weight_from_h: nonpositive denominator (numerical failure)");
  return g.gxy / g.det2;
}

double psi_ratio(const betafield::GreenMatrix& green, int x0, int delta) {
  const int n = green.m.dim();
  if (x0 < 0 || x0 >= n || delta < 0 || delta >= n)
    throw ConfigError("psi_ratio: vertex out of range");
  if (x0 == delta) throw ConfigError("psi_ratio: x0 and delta must differ");
  return green.m(x0, delta) / green.m(delta, delta);
}

double z_law_density(double w_eff, double z) {
  if (!(w_eff > 0.0))
    throw ConfigError("z_law_density: w_eff must be positive");
  if (z <= 0.0) return 0.0;
  const double s = std::sqrt(z) - 1.0 / std::sqrt(z);
  return std::sqrt(w_eff / (2.0 * std::numbers::pi)) / (z * std::sqrt(z)) *
         std::exp(-0.5 * w_eff * s * s);
}

double z_law_cdf(double w_eff, double z) {
  if (!(w_eff > 0.0))
    throw ConfigError("z_law_cdf: w_eff must be positive");
  if (z <= 0.0) return 0.0;
  return inverse_gaussian_cdf(z, 1.0, w_eff);
}

}  // namespace vrjplab::electrical
