#include "vrjplab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vrjplab/distributions.hpp"

namespace vrjplab::coupling {

namespace {

void validate_gammaz(const GammaZ& gz) {
  if (!(gz.gamma > 0.0) || !(gz.z > 0.0))
    throw ConfigError("GammaZ: gamma and z must be positive");
  if (!(gz.lambda >= 0.0 && gz.lambda <= 1.0))
    throw ConfigError("GammaZ: lambda must lie in [0,1]");
  if (!(gz.w >= 0.0)) throw ConfigError("GammaZ: w must be nonnegative");
  if (gz.w == 0.0 && (gz.lambda == 0.0 || gz.lambda == 1.0))
    throw ConfigError("GammaZ: w = 0 requires lambda strictly inside (0,1)");
}

void validate_tilted(const TiltedParams& p) {
  if (!(p.k > 0.0)) throw ConfigError("TiltedParams: k must be positive");
  if (!(p.delta >= -1.0 && p.delta <= 1.0))
    throw ConfigError("TiltedParams: delta must lie in [-1,1]");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GammaZ beta_to_gammaz(double beta1, double beta2, double w, double lambda) {
  if (!(w >= 0.0))
    throw ConfigError("beta_to_gammaz: w must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConfigError("beta_to_gammaz: lambda must lie in [0,1]");
  if (w == 0.0 && (lambda == 0.0 || lambda == 1.0))
    throw ConfigError("beta_to_gammaz: w = 0 requires lambda in (0,1)");
  const double det = 4.0 * beta1 * beta2 - w * w;
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !(det > 0.0))
    throw NotPositiveDefiniteError("beta_to_gammaz: input off support");
  const double denom = 2.0 * w * lambda * (1.0 - lambda) +
                       2.0 * beta2 * lambda * lambda +
                       2.0 * beta1 * (1.0 - lambda) * (1.0 - lambda);
  const double gamma = det / denom;
  const double z =
      (2.0 * beta1 - lambda * lambda * gamma) / (w + lambda * (1.0 - lambda) * gamma);
  GammaZ gz{gamma, z, lambda, w};
  validate_gammaz(gz);
  return gz;
}

std::pair<double, double> gammaz_to_beta(const GammaZ& gz) {
  validate_gammaz(gz);
  const double wt = gz.w + gz.lambda * (1.0 - gz.lambda) * gz.gamma;
  const double b1 = 0.5 * (gz.lambda * gz.lambda * gz.gamma + wt * gz.z);
  const double b2 =
      0.5 * ((1.0 - gz.lambda) * (1.0 - gz.lambda) * gz.gamma + wt / gz.z);
  return {b1, b2};
}

double tilted_pdf(const TiltedParams& p, double u) {
  validate_tilted(p);
  const double v = u / std::sqrt(u * u + 4.0);
  return std::sqrt(p.k / (2.0 * std::numbers::pi)) *
         std::exp(-0.5 * p.k * u * u) * (1.0 + p.delta * v);
}

double tilted_cdf(const TiltedParams& p, double u) {
  validate_tilted(p);
  const double z = z_from_u(u);
  const double w_ig = 0.5 * (1.0 - p.delta);
  const double f_z = inverse_gaussian_cdf(z, 1.0, p.k);
  const double f_rz = inverse_gaussian_cdf(1.0 / z, 1.0, p.k);
  double f = w_ig * f_z + (1.0 - w_ig) * (1.0 - f_rz);
  return std::clamp(f, 0.0, 1.0);
}

double sample_tilted(const TiltedParams& p, Rng& rng) {
  validate_tilted(p);
  const double sd = 1.0 / std::sqrt(p.k);
  for (;;) {
    const double u = sd * rng.gaussian();
    const double v = u / std::sqrt(u * u + 4.0);
    if (rng.uniform() < 0.5 * (1.0 + p.delta * v)) return u;
  }
}

McEstimate tilted_ratio_mean(const TiltedParams& p, double delta_prime,
                             std::uint64_t n, Rng& rng) {
  if (!(delta_prime >= -1.0 && delta_prime <= 1.0))
    throw ConfigError("tilted_ratio_mean: delta_prime must lie in [-1,1]");
  if (n < 2) throw ConfigError("tilted_ratio_mean: need at least 2 samples");
  std::vector<double> vals(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = sample_tilted(p, rng);
    const double v = u / std::sqrt(u * u + 4.0);
    vals[i] = (1.0 + delta_prime * v) / (1.0 + p.delta * v);
  }
  return mc_estimate(vals);
}

TiltedCouple couple_tilted(double k_minus, double k_plus, double delta,
                           Rng& rng) {
  if (!(k_minus > 0.0))
    throw ConfigError("couple_tilted: k_minus must be positive");
  if (k_minus > k_plus)
    throw ConfigError("couple_tilted: requires k_minus <= k_plus");
  const double u_plus = sample_tilted(TiltedParams{k_plus, delta}, rng);
  const double k = std::sqrt(k_plus / k_minus);
  const double u = u_plus;
  const double v_plus = u / std::sqrt(u * u + 4.0);
  const double v_minus = k * u / std::sqrt(k * k * u * u + 4.0);
  // ratio v_plus/v_minus written in the branch-free form that stays finite
  // at u = 0, where it tends to 1/k.
  const double ratio =
      std::sqrt(k * k * u * u + 4.0) / (k * std::sqrt(u * u + 4.0));
  double p_plus =
      0.5 * (1.0 + ratio) * (1.0 + delta * v_minus) / (1.0 + delta * v_plus);
  p_plus = std::clamp(p_plus, 0.0, 1.0);  // exact value is in [0,1]
  const double u_minus = (rng.uniform() < p_plus) ? k * u : -k * u;
  TiltedCouple c;
  c.u_plus = u_plus;
  c.u_minus = u_minus;
  c.p_plus = p_plus;
  c.p_minus = 1.0 - p_plus;
  c.k_minus = k_minus;
  c.k_plus = k_plus;
  c.delta = delta;
  return c;
}

double resample_minus_given_plus(const TiltedCouple& c, Rng& rng) {
  const double k = std::sqrt(c.k_plus / c.k_minus);
  const double ku = k * c.u_plus;
  return (rng.uniform() < c.p_plus) ? ku : -ku;
}

ReducePair reduce_quadratic(const betafield::HMatrix& h11,
                            const std::vector<double>& h12_col1,
                            const std::vector<double>& h12_col2,
                            const std::vector<double>& x1,
                            const std::vector<double>& x2) {
  const int n = h11.m.dim();
  const auto check_col = [&](const std::vector<double>& c, const char* name) {
    if (static_cast<int>(c.size()) != n)
      throw DimensionError(std::string("reduce_quadratic: ") + name +
                           " length mismatch");
    for (double v : c)
      if (v > 0.0)
        throw ConfigError(std::string("reduce_quadratic: ") + name +
                          " must be entrywise nonpositive");
  };
  check_col(h12_col1, "h12_col1");
  check_col(h12_col2, "h12_col2");
  const auto check_x = [&](const std::vector<double>& x, const char* name) {
    if (static_cast<int>(x.size()) != n + 2)
      throw DimensionError(std::string("reduce_quadratic: ") + name +
                           " must have length n+2");
    for (double v : x)
      if (!(v >= 0.0))
        throw ConfigError(std::string("reduce_quadratic: ") + name +
                          " must be entrywise nonnegative");
  };
  check_x(x1, "x1");
  check_x(x2, "x2");

  // Rows of M = -H21 (H11)^{-1} are (H11)^{-1} applied to -h12 columns.
  std::vector<double> m1(n, 0.0), m2(n, 0.0);
  {
    std::vector<double> neg1(n), neg2(n);
    for (int i = 0; i < n; ++i) {
      neg1[i] = -h12_col1[i];
      neg2[i] = -h12_col2[i];
    }
    if (n > 0) {
      m1 = linalg::solve_pd(h11.m, neg1);
      m2 = linalg::solve_pd(h11.m, neg2);
    }
  }
  const std::vector<double> x1_in(x1.begin(), x1.begin() + n);
  const std::vector<double> x2_in(x2.begin(), x2.begin() + n);
  std::vector<double> sol1(n, 0.0), sol2(n, 0.0);
  if (n > 0) {
    sol1 = linalg::solve_pd(h11.m, x1_in);
    sol2 = linalg::solve_pd(h11.m, x2_in);
  }
  ReducePair out;
  out.f1.c = dot(x1_in, sol1);
  out.f2.c = dot(x2_in, sol2);
  out.c_cross = dot(x1_in, sol2);
  out.f1.alpha1 = dot(m1, x1_in) + x1[n];
  out.f1.alpha2 = dot(m2, x1_in) + x1[n + 1];
  out.f2.alpha1 = dot(m1, x2_in) + x2[n];
  out.f2.alpha2 = dot(m2, x2_in) + x2[n + 1];
  return out;
}

double z_from_u(double u) {
  const double s = 0.5 * (u + std::sqrt(u * u + 4.0));
  return s * s;
}

std::array<double, 2> pair_betas(double gamma, double lambda, double w_tilde,
                                 double u, bool same_z) {
  const double z = z_from_u(u);
  const double first = same_z ? w_tilde * z : w_tilde / z;
  return {lambda * lambda * gamma + first,
          (1.0 - lambda) * (1.0 - lambda) * gamma + w_tilde * z};
}

double pair_block_form(double two_beta1, double two_beta2, double w_pair,
                       double a1, double a2, double b1, double b2) {
  const double det = two_beta1 * two_beta2 - w_pair * w_pair;
  return (a1 * (two_beta2 * b1 + w_pair * b2) +
          a2 * (w_pair * b1 + two_beta1 * b2)) /
         det;
}

betafield::HMatrix sample_inner(const linalg::SymMatrix& w_inner,
                                const std::vector<double>& w1,
                                const std::vector<double>& w2, Rng& rng) {
  const int n = w_inner.dim();
  if (static_cast<int>(w1.size()) != n || static_cast<int>(w2.size()) != n)
    throw DimensionError("sample_inner: boundary weight length mismatch");
  std::vector<double> eta(n);
  for (int i = 0; i < n; ++i) eta[i] = w1[i] + w2[i];
  const betafield::BetaSample s =
      betafield::sample_beta(w_inner, betafield::EtaVector(std::move(eta)), rng);
  return betafield::h_from_beta(s);
}

CoupledTriple couple_triple(const betafield::HMatrix& h_inner,
                            const std::vector<double>& w1,
                            const std::vector<double>& w2, double w_minus,
                            double w_plus, const std::vector<double>& x1,
                            Rng& rng, TripleVariant variant) {
  const int n = h_inner.m.dim();
  if (static_cast<int>(w1.size()) != n || static_cast<int>(w2.size()) != n)
    throw DimensionError("couple_triple: boundary weight length mismatch");
  if (static_cast<int>(x1.size()) != n + 2)
    throw DimensionError("couple_triple: x1 must have length n+2");
  for (double v : w1)
    if (!(v >= 0.0))
      throw ConfigError("couple_triple: w1 must be nonnegative");
  for (double v : w2)
    if (!(v >= 0.0))
      throw ConfigError("couple_triple: w2 must be nonnegative");
  for (double v : x1)
    if (!(v >= 0.0))
      throw ConfigError("couple_triple: x1 must be nonnegative");
  if (!(w_minus >= 0.0) || !(w_plus >= w_minus))
    throw ConfigError("couple_triple: invalid weight ordering");

  CoupledTriple t;
  t.variant = variant;
  t.w_minus = w_minus;
  t.w_plus = w_plus;
  t.w1 = w1;
  t.w2 = w2;
  t.x1 = x1;
  t.shared_h = h_inner;

  std::vector<double> sol1(n, 0.0), sol2(n, 0.0), solx(n, 0.0);
  const std::vector<double> x_in(x1.begin(), x1.begin() + n);
  if (n > 0) {
    sol1 = linalg::solve_pd(h_inner.m, w1);
    sol2 = linalg::solve_pd(h_inner.m, w2);
    solx = linalg::solve_pd(h_inner.m, x_in);
  }
  t.k_form = dot(w2, sol1);
  t.q1 = dot(w1, sol1);
  t.q2 = dot(w2, sol2);
  t.q3 = t.q1 + 2.0 * t.k_form + t.q2;
  t.alpha1 = dot(w1, solx) + x1[n];
  t.alpha2 = dot(w2, solx) + x1[n + 1];
  t.c_self = dot(x_in, solx);
  const double asum = t.alpha1 + t.alpha2;
  t.lambda = (asum > 0.0) ? t.alpha1 / asum : 0.0;
  t.delta = 2.0 * t.lambda - 1.0;

  t.gamma = sample_gamma(0.5, 0.5, rng);
  const double cross = t.lambda * (1.0 - t.lambda) * t.gamma;
  t.w_tilde_minus = t.k_form + w_minus + cross;
  t.w_tilde_plus = t.k_form + w_plus + cross;
  if (!(t.w_tilde_minus > 0.0))
    throw ConfigError(
        "couple_triple: modified pair is disconnected on the minus side "
        "(effective weight zero)");

  t.u_couple = couple_tilted(t.w_tilde_minus, t.w_tilde_plus, t.delta, rng);
  t.z_minus = z_from_u(t.u_couple.u_minus);
  t.z_plus = z_from_u(t.u_couple.u_plus);

  const bool same_z = (variant == TripleVariant::kSameZ);
  const std::array<double, 2> bm2 = pair_betas(
      t.gamma, t.lambda, t.w_tilde_minus, t.u_couple.u_minus, same_z);
  const std::array<double, 2> bp2 =
      pair_betas(t.gamma, t.lambda, t.w_tilde_plus, t.u_couple.u_plus, same_z);
  t.beta_tilde_minus = {0.5 * bm2[0], 0.5 * bm2[1]};
  t.beta_tilde_plus = {0.5 * bp2[0], 0.5 * bp2[1]};

  const auto assemble = [&](double two_b1, double two_b2,
                            double w_pair) -> betafield::HMatrix {
    linalg::SymMatrix h(n + 2);
    for (int i = 0; i < n; ++i) {
      h.set(i, i, h_inner.m(i, i));
      for (int j = 0; j < i; ++j) h.set(i, j, h_inner.m(i, j));
      h.set(i, n, -w1[i]);
      h.set(i, n + 1, -w2[i]);
    }
    h.set(n, n, two_b1 + t.q1);
    h.set(n + 1, n + 1, two_b2 + t.q2);
    h.set(n, n + 1, -w_pair);
    return betafield::HMatrix{std::move(h), h_inner.sample_id};
  };

  const double plus_b1 = (variant == TripleVariant::kMinusBetaInPlus)
                             ? bm2[0]
                             : bp2[0];
  t.h_minus = assemble(bm2[0], bm2[1], w_minus);
  t.h_plus = assemble(plus_b1, bp2[1], w_plus);

  {
    linalg::SymMatrix h(n + 1);
    for (int i = 0; i < n; ++i) {
      h.set(i, i, h_inner.m(i, i));
      for (int j = 0; j < i; ++j) h.set(i, j, h_inner.m(i, j));
      h.set(i, n, -(w1[i] + w2[i]));
    }
    h.set(n, n, t.gamma + t.q3);
    t.h_inf = betafield::HMatrix{std::move(h), h_inner.sample_id};
  }

  if (variant == TripleVariant::kFaithful) {
    if (!linalg::is_pd(t.h_minus.m) || !linalg::is_pd(t.h_plus.m) ||
        !linalg::is_pd(t.h_inf.m))
      throw NotPositiveDefiniteError("couple_triple: assembly failed PD check");
  }
  return t;
}

double ratio_form(const GammaZ& gz, double theta) {
  validate_gammaz(gz);
  if (!(theta >= 0.0 && theta <= 1.0))
    throw ConfigError("ratio_form: theta must lie in [0,1]");
  const double sz = std::sqrt(gz.z);
  return (theta / sz + (1.0 - theta) * sz) /
         (gz.gamma * ((1.0 - gz.lambda) * sz + gz.lambda / sz));
}

namespace {

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double inf_norm(const linalg::SymMatrix& m) {
  double best = 0.0;
  for (int i = 0; i < m.dim(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.dim(); ++j) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

TripleAudit audit_triple(const CoupledTriple& t) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kStrict = 1e-9;
  TripleAudit a;
  a.gamma = t.gamma;

  // Stable path: shared inner self-term plus the reduced pair form. The
  // numerator mixes only nonnegative stored quantities; the denominator is
  // the factored determinant, so no subtraction of near-equal values occurs
  // anywhere and the result is accurate even when gamma is tiny.
  double stable[3] = {0.0, 0.0, 0.0};
  for (int side = 0; side < 2; ++side) {
    const bool plus = side == 1;
    const double wt = plus ? t.w_tilde_plus : t.w_tilde_minus;
    const double z = plus ? t.z_plus : t.z_minus;
    const auto& bt = plus ? t.beta_tilde_plus : t.beta_tilde_minus;
    const double w_pair = t.k_form + (plus ? t.w_plus : t.w_minus);
    const double sz = std::sqrt(z);
    const double root = t.lambda * sz + (1.0 - t.lambda) / sz;
    const double det = wt * t.gamma * root * root;
    (plus ? a.det_plus : a.det_minus) = det;
    const double num = t.alpha1 * t.alpha1 * 2.0 * bt[1] +
                       2.0 * t.alpha1 * t.alpha2 * w_pair +
                       t.alpha2 * t.alpha2 * 2.0 * bt[0];
    stable[side] = t.c_self + num / det;

    // Determinant identity from the stored entries. The left side is the
    // cancellation-prone evaluation, so its achievable accuracy is
    // eps times the ratio of the summed magnitudes to the true value.
    const double lhs = 4.0 * bt[0] * bt[1] - w_pair * w_pair;
    a.det_err = std::max(a.det_err, std::abs(lhs - det) / det);
    a.kappa_det = std::max(
        a.kappa_det, (4.0 * bt[0] * bt[1] + w_pair * w_pair) / det);
  }
  const double abar = t.alpha1 + t.alpha2;
  stable[2] = t.c_self + abar * abar / t.gamma;
  a.three_way_stable =
      std::max({rel_gap(stable[0], stable[1]), rel_gap(stable[0], stable[2]),
                rel_gap(stable[1], stable[2])});

  // Matrix path: the same forms from the assembled operators.
  const int np2 = t.h_minus.m.dim();
  std::vector<double> xbar(t.x1.begin(), t.x1.end() - 1);
  xbar[np2 - 2] = t.x1[np2 - 2] + t.x1[np2 - 1];
  const double matrix[3] = {
      linalg::quad_form_pd_ext(t.h_minus.m, t.x1, t.x1),
      linalg::quad_form_pd_ext(t.h_plus.m, t.x1, t.x1),
      linalg::quad_form_pd_ext(t.h_inf.m, xbar, xbar)};
  a.three_way_matrix =
      std::max({rel_gap(matrix[0], matrix[1]), rel_gap(matrix[0], matrix[2]),
                rel_gap(matrix[1], matrix[2])});
  for (int i = 0; i < 3; ++i)
    a.matrix_vs_stable = std::max(a.matrix_vs_stable,
                                  rel_gap(matrix[i], stable[i]));

  // Measured conditioning of the three operators.
  const linalg::SymMatrix* ms[3] = {&t.h_minus.m, &t.h_plus.m, &t.h_inf.m};
  for (const auto* m : ms) {
    const auto inv = linalg::invert_pd(*m);
    a.kappa_hat = std::max(a.kappa_hat, inf_norm(*m) * inf_norm(inv));
  }
  a.cond_tol = std::max(kStrict, 64.0 * kEps * a.kappa_hat);
  a.det_tol = std::max(kStrict, 64.0 * kEps * a.kappa_det);

  // Exact transfers: tilted energy and the shared inner diagonals.
  const double e_minus =
      t.u_couple.k_minus * t.u_couple.u_minus * t.u_couple.u_minus;
  const double e_plus =
      t.u_couple.k_plus * t.u_couple.u_plus * t.u_couple.u_plus;
  a.energy_err = std::abs(e_minus - e_plus) / std::max(1.0, std::abs(e_plus));
  for (int i = 0; i < t.shared_h.m.dim(); ++i) {
    const double d = t.h_minus.m(i, i);
    const double s = std::max(1.0, std::abs(d));
    a.diag_err = std::max({a.diag_err, std::abs(d - t.h_plus.m(i, i)) / s,
                           std::abs(d - t.h_inf.m(i, i)) / s});
  }
  return a;
}

}  // namespace vrjplab::coupling
