#include "vrjplab/betafield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "vrjplab/distributions.hpp"

namespace vrjplab::betafield {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EtaVector::EtaVector(std::vector<double> v) : values(std::move(v)) {
  for (double x : values)
    if (!(x >= 0.0))
      throw ConfigError("EtaVector: entries must be nonnegative");
}

double nu_log_density(const linalg::SymMatrix& w, const EtaVector& eta,
                      const std::vector<double>& beta) {
  const int n = w.dim();
  if (eta.dim() != n || static_cast<int>(beta.size()) != n)
    throw DimensionError("nu_log_density: dimension mismatch");
  if (n == 0) return 0.0;
  const HMatrix h = h_from_beta(w, beta);
  if (!linalg::is_pd(h.m)) return -kInf;

  // ones^T H ones
  double quad_ones = 0.0;
  for (int i = 0; i < n; ++i) {
    quad_ones += h.m(i, i);
    for (int j = 0; j < i; ++j) quad_ones += 2.0 * h.m(i, j);
  }
  double eta_sum = 0.0;
  double quad_eta = 0.0;
  bool eta_nonzero = false;
  for (int i = 0; i < n; ++i) {
    eta_sum += eta[i];
    if (eta[i] != 0.0) eta_nonzero = true;
  }
  if (eta_nonzero) {
    const std::vector<double> sol = linalg::solve_pd(h.m, eta.values);
    for (int i = 0; i < n; ++i) quad_eta += eta[i] * sol[i];
  }
  const double logdet = linalg::logdet_pd(h.m);
  return 0.5 * n * std::log(2.0 / std::numbers::pi) -
         0.5 * (quad_ones + quad_eta - 2.0 * eta_sum) - 0.5 * logdet;
}

double sample_gig_half(double rate, double inv_coeff, Rng& rng) {
  if (!(rate > 0.0))
    throw ConfigError("sample_gig_half: rate must be positive");
  if (!(inv_coeff >= 0.0))
    throw ConfigError("sample_gig_half: inv_coeff must be nonnegative");
  if (inv_coeff == 0.0) return sample_gamma(0.5, 0.5 * rate, rng);
  const double mu = std::sqrt(rate / inv_coeff);
  const double y = sample_inverse_gaussian(mu, rate, rng);
  return 1.0 / y;
}

double gig_half_cdf(double x, double rate, double inv_coeff) {
  if (x <= 0.0) return 0.0;
  if (inv_coeff == 0.0) return gamma_cdf(x, 0.5, 0.5 * rate);
  const double mu = std::sqrt(rate / inv_coeff);
  return 1.0 - inverse_gaussian_cdf(1.0 / x, mu, rate);
}

BetaSample sample_beta(const linalg::SymMatrix& w, const EtaVector& eta,
                       Rng& rng, const std::vector<int>* order,
                       std::vector<EliminationStep>* steps) {
  const int n = w.dim();
  if (eta.dim() != n) throw DimensionError("sample_beta: eta dimension mismatch");
  std::vector<int> ord;
  if (order) {
    ord = *order;
    if (static_cast<int>(ord.size()) != n)
      throw DimensionError("sample_beta: order length mismatch");
    std::vector<char> seen(n, 0);
    for (int v : ord) {
      if (v < 0 || v >= n || seen[v])
        throw ConfigError("sample_beta: order must be a permutation");
      seen[v] = 1;
    }
  } else {
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0);
  }

  linalg::SymMatrix cur = w;  // accumulates Schur updates, diagonal included
  std::vector<double> eta_cur = eta.values;
  std::vector<char> active(n, 1);
  std::vector<double> beta(n, 0.0);
  if (steps) {
    steps->clear();
    steps->reserve(n);
  }

  for (int idx = 0; idx < n; ++idx) {
    const int v = ord[idx];
    active[v] = 0;
    const double a = cur(v, v);
    double eta_hat = eta_cur[v];
    for (int k = 0; k < n; ++k)
      if (active[k]) eta_hat += cur(v, k);
    const double h = sample_gig_half(1.0, eta_hat * eta_hat, rng);
    beta[v] = 0.5 * (h + a);

    EliminationStep step;
    if (steps) {
      step.pivot = v;
      step.self_weight = a;
      step.eta_eff = eta_cur[v];
      step.eta_hat = eta_hat;
      step.schur_update.assign(n, 0.0);
    }
    const double inv_h = 1.0 / h;
    for (int j = 0; j < n; ++j) {
      if (!active[j]) continue;
      const double wj = cur(v, j);
      if (steps) step.schur_update[j] = wj * std::sqrt(inv_h);
      if (wj == 0.0) continue;
      eta_cur[j] += wj * eta_cur[v] * inv_h;
      for (int k = 0; k <= j; ++k) {
        if (!active[k]) continue;
        const double wk = cur(v, k);
        if (wk != 0.0) cur.add(j, k, wj * wk * inv_h);
      }
    }
    if (steps) steps->push_back(std::move(step));
  }
  return BetaSample{std::move(beta), w};
}

HMatrix h_from_beta(const linalg::SymMatrix& w, const std::vector<double>& beta,
                    std::uint64_t sample_id) {
  const int n = w.dim();
  if (static_cast<int>(beta.size()) != n)
    throw DimensionError("h_from_beta: dimension mismatch");
  linalg::SymMatrix h(n);
  for (int i = 0; i < n; ++i) {
    h.set(i, i, 2.0 * beta[i] - w(i, i));
    for (int j = 0; j < i; ++j) h.set(i, j, -w(i, j));
  }
  return HMatrix{std::move(h), sample_id};
}

HMatrix h_from_beta(const BetaSample& sample, std::uint64_t sample_id) {
  return h_from_beta(sample.w_ref, sample.beta, sample_id);
}

GreenMatrix green(const HMatrix& h) {
  linalg::SymMatrix g = linalg::invert_pd(h.m);
  const int n = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (g(i, j) < -1e-12)
        throw Error("green: negative entry in the inverse of an M-matrix");
  return GreenMatrix{std::move(g), h.sample_id};
}

}  // namespace vrjplab::betafield
