#pragma once

#include <cstdint>
#include <vector>

#include "vrjplab/errors.hpp"
#include "vrjplab/linalg.hpp"
#include "vrjplab/rng.hpp"

namespace vrjplab::betafield {

/// Nonnegative tilt parameters, one per vertex.
struct EtaVector {
  std::vector<double> values;

  EtaVector() = default;
  explicit EtaVector(std::vector<double> v);
  static EtaVector zero(int n) { return EtaVector(std::vector<double>(n, 0.0)); }
  int dim() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

/// One exact draw of the random potential, together with the weight matrix
/// it was sampled against.
struct BetaSample {
  std::vector<double> beta;
  linalg::SymMatrix w_ref;
};

/// H matrix of a potential: H(i,i) = 2*beta_i - W(i,i), H(i,j) = -W(i,j).
/// Positive definite on the support of the sampling law.
struct HMatrix {
  linalg::SymMatrix m;
  std::uint64_t sample_id = 0;
};

/// Inverse of an HMatrix; entrywise nonnegative, strictly positive on
/// connected pairs.
struct GreenMatrix {
  linalg::SymMatrix m;
  std::uint64_t sample_id = 0;
};

/// Record of one pivot elimination inside sample_beta, kept for diagnostics
/// and for tests that replay the Schur recursion.
struct EliminationStep {
  int pivot = 0;
  /// Accumulated self-weight of the pivot at elimination time.
  double self_weight = 0.0;
  /// Accumulated tilt of the pivot at elimination time.
  double eta_eff = 0.0;
  /// eta_eff plus the pivot's weights into vertices still active; this is the
  /// parameter of the pivot's one-dimensional conditional law.
  double eta_hat = 0.0;
  /// Rank-one correction applied to the remaining block: the update to
  /// W(j,k) is schur_update[j]*schur_update[k] over still-active j, k
  /// (indexed by vertex id; zero for eliminated vertices).
  std::vector<double> schur_update;
};

/// Log of the joint density of the potential at `beta`, including the
/// (2/pi)^{n/2} normalization; -infinity when H_beta fails to be positive
/// definite (off support).
double nu_log_density(const linalg::SymMatrix& w, const EtaVector& eta,
                      const std::vector<double>& beta);

/// Exact sample of the law with density proportional to
/// h^{-1/2} * exp(-(rate*h + inv_coeff/h)/2) on h > 0.
/// inv_coeff = 0 reduces to Gamma(shape 1/2, rate rate/2); otherwise the
/// reciprocal is inverse-Gaussian and the draw is rejection-free.
double sample_gig_half(double rate, double inv_coeff, Rng& rng);

/// CDF of the sample_gig_half law, for one-sample distribution tests.
double gig_half_cdf(double x, double rate, double inv_coeff);

/// Exact joint sample of the potential on n vertices by sequential vertex
/// elimination: each pivot's conditional law is one-dimensional and sampled
/// by sample_gig_half; the remaining block absorbs a rank-one Schur update.
/// `order` optionally fixes the pivot order (must be a permutation of
/// 0..n-1; default ascending). `steps`, when non-null, receives one
/// EliminationStep per pivot.
BetaSample sample_beta(const linalg::SymMatrix& w, const EtaVector& eta,
                       Rng& rng, const std::vector<int>* order = nullptr,
                       std::vector<EliminationStep>* steps = nullptr);

/// Assembles the H matrix for given weights and potential values.
HMatrix h_from_beta(const linalg::SymMatrix& w,
                    const std::vector<double>& beta,
                    std::uint64_t sample_id = 0);
HMatrix h_from_beta(const BetaSample& sample, std::uint64_t sample_id = 0);

/// Inverse of h; verifies the entrywise nonnegativity that the M-matrix
/// structure guarantees. Throws NotPositiveDefiniteError when h is not PD
/// and Error when a materially negative entry appears (implementation bug).
GreenMatrix green(const HMatrix& h);

}  // namespace vrjplab::betafield
