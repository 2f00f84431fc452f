#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "vrjplab/betafield.hpp"
#include "vrjplab/errors.hpp"
#include "vrjplab/linalg.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/stats.hpp"

namespace vrjplab::coupling {

/// Change of variables for a two-vertex potential: gamma carries the
/// rank-one direction (lambda, 1-lambda), Z the transverse coordinate.
struct GammaZ {
  double gamma = 0.0;
  double z = 0.0;
  double lambda = 0.0;
  double w = 0.0;
};

/// Parameters of the tilted Gaussian law with density
/// sqrt(k/2pi) * exp(-k u^2/2) * (1 + delta * u / sqrt(u^2+4)).
struct TiltedParams {
  double k = 1.0;
  double delta = 0.0;
};

/// Coupled pair (U-, U+) with the two-point conditional mixture weights.
/// Invariants: p_plus + p_minus = 1; k_minus*(u_minus)^2 = k_plus*(u_plus)^2
/// exactly, since u_minus = +-sqrt(k_plus/k_minus)*u_plus by construction.
struct TiltedCouple {
  double u_plus = 0.0;
  double u_minus = 0.0;
  double p_plus = 1.0;
  double p_minus = 0.0;
  double k_minus = 1.0;
  double k_plus = 1.0;
  double delta = 0.0;
};

/// Data of the two-block quadratic-form reduction for one vector:
/// c is the self term X^{1,T} (H^{11})^{-1} X^{1} of that vector and
/// (alpha1, alpha2) its boundary coefficients. All nonnegative for
/// nonnegative vectors against a PD M-matrix block.
struct ReducedForm {
  double c = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// Output of reduce_quadratic: per-vector forms plus the cross term
/// c_cross = X^{1,1T} (H^{11})^{-1} X^{2,1} shared by both vectors.
struct ReducePair {
  ReducedForm f1;
  ReducedForm f2;
  double c_cross = 0.0;
};

/// Deliberate corruptions of the joint construction, used as negative
/// controls: kSameZ feeds the transverse variable with the same orientation
/// into both pair coordinates; kMinusBetaInPlus places the minus-side pair
/// potential into the plus-side matrix.
enum class TripleVariant { kFaithful, kSameZ, kMinusBetaInPlus };

/// Jointly constructed triple of operators sharing the inner block: the
/// (n+2)-dimensional minus/plus matrices differ only through the modified
/// pair, and the (n+1)-dimensional h_inf merges the pair into one vertex.
struct CoupledTriple {
  betafield::HMatrix h_minus;   // dimension n+2
  betafield::HMatrix h_plus;    // dimension n+2
  betafield::HMatrix h_inf;     // dimension n+1
  betafield::HMatrix shared_h;  // inner dimension n
  double gamma = 0.0;
  double lambda = 0.0;
  TiltedCouple u_couple;

  // Construction intermediates, exposed for identity and martingale tests.
  double delta = 0.0;
  double k_form = 0.0;  // W2^T H^{-1} W1
  double q1 = 0.0;      // W1^T H^{-1} W1
  double q2 = 0.0;      // W2^T H^{-1} W2
  double q3 = 0.0;      // W3^T H^{-1} W3, W3 = W1 + W2
  double alpha1 = 0.0;  // boundary coefficients of the construction vector
  double alpha2 = 0.0;
  double c_self = 0.0;  // X^{1,1T} H^{-1} X^{1,1}
  double w_tilde_minus = 0.0;
  double w_tilde_plus = 0.0;
  double z_minus = 0.0;
  double z_plus = 0.0;
  std::array<double, 2> beta_tilde_minus{};  // pair potentials (not doubled)
  std::array<double, 2> beta_tilde_plus{};
  double w_minus = 0.0;
  double w_plus = 0.0;
  std::vector<double> w1;
  std::vector<double> w2;
  std::vector<double> x1;
  TripleVariant variant = TripleVariant::kFaithful;
};

/// Forward change of variables on a two-vertex potential with weight w and
/// direction lambda. Throws NotPositiveDefiniteError off support and
/// ConfigError for inadmissible (w, lambda).
GammaZ beta_to_gammaz(double beta1, double beta2, double w, double lambda);

/// Exact inverse of beta_to_gammaz:
/// 2*beta1 = lambda^2*gamma + (w + lambda(1-lambda)gamma) * Z,
/// 2*beta2 = (1-lambda)^2*gamma + (w + lambda(1-lambda)gamma) / Z.
std::pair<double, double> gammaz_to_beta(const GammaZ& gz);

/// Density of the tilted Gaussian law at u.
double tilted_pdf(const TiltedParams& p, double u);

/// Closed-form CDF of the tilted Gaussian law: the image variable
/// z(u) = ((u + sqrt(u^2+4))/2)^2 is a two-component mixture of an
/// inverse-Gaussian law and its reciprocal with weights (1-delta)/2 and
/// (1+delta)/2.
double tilted_cdf(const TiltedParams& p, double u);

/// Exact sampler: centered Gaussian with variance 1/k, accepted with
/// probability (1 + delta*u/sqrt(u^2+4))/2.
double sample_tilted(const TiltedParams& p, Rng& rng);

/// MC estimate of E[(1 + delta_prime*V)/(1 + delta*V)], V = U/sqrt(U^2+4);
/// equals 1 for every admissible pair of tilts.
McEstimate tilted_ratio_mean(const TiltedParams& p, double delta_prime,
                             std::uint64_t n, Rng& rng);

/// Couples U+ ~ tilted(k_plus, delta) with U- = +-sqrt(k_plus/k_minus)*U+
/// so that the marginal of U- is tilted(k_minus, delta) and the energies
/// k*(u)^2 agree exactly. Requires 0 < k_minus <= k_plus.
TiltedCouple couple_tilted(double k_minus, double k_plus, double delta,
                           Rng& rng);

/// Redraws the two-point conditional law of U- given U+ stored in c.
double resample_minus_given_plus(const TiltedCouple& c, Rng& rng);

/// Quadratic-form reduction against the inner block: with
/// M = -H^{21}(H^{11})^{-1} (entrywise >= 0), alpha_i(X) = (M X^1)_i + X^2_i;
/// for any PD completion, X^1T G X^2 = c_cross + alpha(X1)^T G^{22} alpha(X2).
/// h12_col1/h12_col2 are the two columns of H^{12} (entries <= 0); x1, x2
/// are nonnegative vectors of length n+2.
ReducePair reduce_quadratic(const betafield::HMatrix& h11,
                            const std::vector<double>& h12_col1,
                            const std::vector<double>& h12_col2,
                            const std::vector<double>& x1,
                            const std::vector<double>& x2);

/// z(u) = ((u + sqrt(u^2+4))/2)^2, the monotone map with u = sqrt(z)-1/sqrt(z).
double z_from_u(double u);

/// Pair potentials (2*beta_{n+1}, 2*beta_{n+2}) given the shared gamma, the
/// direction lambda, the effective tilted weight w_tilde and the variable u.
/// The faithful orientation pairs coordinate n+1 with 1/z(u); same_z is the
/// corrupted negative-control orientation.
std::array<double, 2> pair_betas(double gamma, double lambda, double w_tilde,
                                 double u, bool same_z = false);

/// (a1,a2) S^{-1} (b1,b2)^T for the 2x2 pair block
/// S = [[two_beta1, -w_pair], [-w_pair, two_beta2]].
double pair_block_form(double two_beta1, double two_beta2, double w_pair,
                       double a1, double a2, double b1, double b2);

/// Samples the inner potential against the marginal tilt eta_i = w1_i + w2_i
/// that makes it the common inner law of all three assembled operators.
betafield::HMatrix sample_inner(const linalg::SymMatrix& w_inner,
                                const std::vector<double>& w1,
                                const std::vector<double>& w2, Rng& rng);

/// Joint construction of (H-, H+, H_inf) over a shared inner block h_inner:
/// the modified pair receives weights w_minus <= w_plus, the construction
/// vector x1 (length n+2, nonnegative) selects the direction lambda, and the
/// transverse coupling is couple_tilted with effective weights
/// k_form + w_pm + lambda(1-lambda)*gamma.
/// Throws ConfigError on invalid weight ordering or when the modified pair
/// is disconnected on the minus side (effective weight zero).
CoupledTriple couple_triple(const betafield::HMatrix& h_inner,
                            const std::vector<double>& w1,
                            const std::vector<double>& w2, double w_minus,
                            double w_plus, const std::vector<double>& x1,
                            Rng& rng,
                            TripleVariant variant = TripleVariant::kFaithful);

/// Right-hand side of the two-vertex bilinear identity:
/// (lambda,1-lambda) G (theta,1-theta)^T
///   = (theta/sqrt(Z) + (1-theta)sqrt(Z)) /
///     (gamma ((1-lambda)sqrt(Z) + lambda/sqrt(Z))).
double ratio_form(const GammaZ& gz, double theta);

/// Per-draw numerical audit of the identities carried by a coupled triple.
///
/// Stable values evaluate the three quadratic forms X^{1T} G X^{1} through
/// the two-block reduction with the factored pair determinant
///   det S = w_tilde * gamma * (lambda*sqrt(z) + (1-lambda)/sqrt(z))^2,
/// a cancellation-free path (only nonnegative products are summed), so its
/// relative error stays near machine epsilon uniformly in gamma. Matrix
/// values re-derive the same forms from the assembled operators; they are
/// limited by the rounding of the stored double entries, whose effect on the
/// form grows like eps * kappa(H), and kappa scales like 1/gamma near
/// degenerate draws. Matrix-path errors therefore come with the measured
/// condition estimate and a per-draw tolerance max(1e-9, 64*eps*kappa); the
/// tolerance collapses to the strict 1e-9 on well-conditioned draws.
struct TripleAudit {
  double three_way_stable = 0.0;  // max pairwise rel. gap, stable path
  double three_way_matrix = 0.0;  // max pairwise rel. gap, assembled path
  double matrix_vs_stable = 0.0;  // worst rel. gap between the two paths
  double det_err = 0.0;      // pair determinant identity, stored-entry path
  double energy_err = 0.0;   // k_minus*u_minus^2 vs k_plus*u_plus^2
  double diag_err = 0.0;     // shared inner diagonals across the matrices
  double det_minus = 0.0;    // factored pair determinants
  double det_plus = 0.0;
  double kappa_hat = 1.0;    // worst measured condition of the three
  double kappa_det = 1.0;    // conditioning of the determinant cancellation
  double cond_tol = 0.0;     // max(1e-9, 64*eps*kappa_hat)
  double det_tol = 0.0;      // max(1e-9, 64*eps*kappa_det)
  double gamma = 0.0;
};

/// Runs the audit on a faithful triple. Throws NotPositiveDefiniteError if
/// any assembled matrix fails to factor.
TripleAudit audit_triple(const CoupledTriple& t);

}  // namespace vrjplab::coupling
