#pragma once

#include <vector>

#include "vrjplab/betafield.hpp"
#include "vrjplab/graphs.hpp"

namespace vrjplab::electrical {

/// Solution of the two-point Dirichlet problem with V(x0)=1, V(delta)=0.
struct PotentialSolution {
  std::vector<double> potential;
  /// Dirichlet energy sum_e c_e (V_u - V_v)^2; equals c_eff at the minimum.
  double energy = 0.0;
  /// Net current out of x0 under the harmonic potential.
  double c_eff = 0.0;
  /// Max |net current| at interior vertices; ~0 for the exact solution.
  double harmonic_residual = 0.0;
};

/// Solves the harmonic problem on the interior (PD solve on the grounded
/// Laplacian block). c_edges is parallel to g.edges(), strictly positive.
/// Throws ConfigError if x0 == delta.
PotentialSolution solve_potential(const graphs::WeightedGraph& g,
                                  const std::vector<double>& c_edges, int x0,
                                  int delta);

/// Effective conductance between x0 and delta (the value of the minimized
/// Dirichlet energy with unit potential difference).
double effective_conductance(const graphs::WeightedGraph& g,
                             const std::vector<double>& c_edges, int x0,
                             int delta);
/// Convenience overload using the graph's own weights as conductances.
double effective_conductance(const graphs::WeightedGraph& g, int x0,
                             int delta);

/// Effective weight between x and y read off the Green matrix:
/// G(x,y) / (G(x,x)G(y,y) - G(x,y)^2). Throws Error when the denominator is
/// not positive (impossible for a PD matrix; signals numerical failure).
double effective_weight(const betafield::GreenMatrix& green, int x, int y);

/// The same quantity along the dual route, reading the H matrix: minus the
/// off-diagonal entry of the Schur complement of h onto {x, y}, i.e.
/// W_{xy} plus the cross term of the eliminated block. Evaluated in
/// extended precision so the two routes can be compared at 1e-9 even on
/// ill-conditioned sampled matrices.
double effective_weight_schur(const betafield::HMatrix& h, int x, int y);

/// Route through the Green entries: G(x,y) over the 2x2 principal minor of
/// h^{-1} at {x, y}, with the minor evaluated through the cancellation-free
/// Lagrange form of linalg::green_pair_pd; pairs with effective_weight_schur
/// for the tight cross-check.
double effective_weight_from_h(const betafield::HMatrix& h, int x, int y);

/// Recurrence proxy G(x0, delta) / G(delta, delta).
double psi_ratio(const betafield::GreenMatrix& green, int x0, int delta);

/// Report-level label threshold for "near-recurrent" runs.
inline constexpr double kPsiRecurrentEps = 1e-3;

/// Density of the two-point ratio law:
/// sqrt(w_eff/2pi) * z^{-3/2} * exp(-(w_eff/2)(sqrt(z)-1/sqrt(z))^2);
/// zero for z <= 0.
double z_law_density(double w_eff, double z);

/// CDF of the same law (an inverse-Gaussian law with unit mean and shape
/// w_eff, since (sqrt(z)-1/sqrt(z))^2 = (z-1)^2/z).
double z_law_cdf(double w_eff, double z);

}  // namespace vrjplab::electrical
