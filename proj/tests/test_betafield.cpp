#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "vrjplab/betafield.hpp"
#include "vrjplab/distributions.hpp"
#include "vrjplab/linalg.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/stats.hpp"

using vrjplab::Rng;
using vrjplab::linalg::SymMatrix;
namespace betafield = vrjplab::betafield;

namespace {

// Composite Simpson on [a,b] with n (even) subintervals.
template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("potential density closed-form values") {
  // Single vertex, no tilt, beta = 1/2: H = (1), so the density is
  // sqrt(2/pi) * exp(-1/2).
  SymMatrix w1(1);
  const double l1 = betafield::nu_log_density(w1, betafield::EtaVector::zero(1),
                                              {0.5});
  CHECK(l1 == doctest::Approx(0.5 * std::log(2.0 / std::numbers::pi) - 0.5)
                  .epsilon(1e-14));

  // Off support: H fails to be positive definite.
  const double off = betafield::nu_log_density(
      w1, betafield::EtaVector::zero(1), {-1.0});
  CHECK(off == -std::numeric_limits<double>::infinity());

  // Two vertices joined by weight 1, beta = (1,1): H = [[2,-1],[-1,2]],
  // 1^T H 1 = 2, det = 3.
  SymMatrix w2(2);
  w2.set(0, 1, 1.0);
  const double l2 = betafield::nu_log_density(w2, betafield::EtaVector::zero(2),
                                              {1.0, 1.0});
  CHECK(l2 == doctest::Approx(std::log(2.0 / std::numbers::pi) - 1.0 -
                              0.5 * std::log(3.0))
                  .epsilon(1e-14));

  // Boundary of the support (det H = 0) is off support as well.
  const double edge = betafield::nu_log_density(
      w2, betafield::EtaVector::zero(2), {0.5, 0.5});
  CHECK(edge == -std::numeric_limits<double>::infinity());
}

TEST_CASE("tilted density shifts by the linear term") {
  // log nu_eta(beta) - log nu_0(beta) = -(eta^T H^{-1} eta)/2 + sum eta.
  SymMatrix w(2);
  w.set(0, 1, 0.8);
  const std::vector<double> beta = {0.9, 1.4};
  const betafield::EtaVector eta({0.3, 1.1});
  const double base =
      betafield::nu_log_density(w, betafield::EtaVector::zero(2), beta);
  const double tilted = betafield::nu_log_density(w, eta, beta);
  const auto h = betafield::h_from_beta(w, beta);
  const double q =
      vrjplab::linalg::quad_form_pd_ext(h.m, eta.values, eta.values);
  CHECK(tilted - base == doctest::Approx(-0.5 * q + 0.3 + 1.1).epsilon(1e-12));
}

TEST_CASE("single-vertex density integrates to one") {
  // Substituting 2*beta = t^2 makes the integrand smooth near the origin;
  // the tilt eta = 0.7 exercises the 1/(2 beta) term.
  SymMatrix w(1);
  const betafield::EtaVector eta({0.7});
  const auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double beta = 0.5 * t * t;
    const double ld = betafield::nu_log_density(w, eta, {beta});
    return std::exp(ld) * t;  // d beta = t dt
  };
  const double total = simpson(integrand, 0.0, 14.0, 20000);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two-vertex density integrates to one") {
  // w = 1.3, eta = (0.4, 0.9); support requires (2b1)(2b2) > w^2, where the
  // density and all derivatives vanish, so the cut is harmless to Simpson.
  SymMatrix w(2);
  w.set(0, 1, 1.3);
  const betafield::EtaVector eta({0.4, 0.9});
  const auto inner = [&](double s) {
    return simpson(
        [&](double t) {
          if (s <= 0.0 || t <= 0.0) return 0.0;
          const double ld =
              betafield::nu_log_density(w, eta, {0.5 * s * s, 0.5 * t * t});
          if (ld == -std::numeric_limits<double>::infinity()) return 0.0;
          return std::exp(ld) * s * t;
        },
        0.0, 12.0, 960);
  };
  const double total = simpson(inner, 0.0, 12.0, 960);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gig_half_cdf reference values") {
  // Frozen from an independent arbitrary-precision evaluation.
  CHECK(betafield::gig_half_cdf(1.0, 1.0, 4.0) ==
        doctest::Approx(0.084953318671024097).epsilon(1e-12));
  CHECK(betafield::gig_half_cdf(0.7, 2.0, 0.0) ==
        doctest::Approx(0.76327642936231088).epsilon(1e-12));
  CHECK(betafield::gig_half_cdf(2.0, 1.0, 1.0) ==
        doctest::Approx(0.63502445182710032).epsilon(1e-12));
  CHECK(betafield::gig_half_cdf(0.0, 1.0, 1.0) == 0.0);
}

TEST_CASE("gig_half sampler moments") {
  const std::uint64_t n = 30000;
  Rng rng(90210);
  // inv_coeff = 0: Gamma(1/2, 1/2), mean 1.
  std::vector<double> plain(n);
  for (auto& x : plain) x = betafield::sample_gig_half(1.0, 0.0, rng);
  auto est = vrjplab::mc_estimate(plain);
  CHECK(std::fabs(est.mean - 1.0) < 3.0 * est.std_error);

  // inv_coeff = 4: E[h] = sqrt(4) + 1 = 3 and E[1/h] = 1/sqrt(4) = 1/2.
  std::vector<double> hs(n), inv(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    hs[i] = betafield::sample_gig_half(1.0, 4.0, rng);
    inv[i] = 1.0 / hs[i];
  }
  est = vrjplab::mc_estimate(hs);
  CHECK(std::fabs(est.mean - 3.0) < 3.0 * est.std_error);
  est = vrjplab::mc_estimate(inv);
  CHECK(std::fabs(est.mean - 0.5) < 3.0 * est.std_error);
}

TEST_CASE("gig_half sampler matches its cdf") {
  const std::uint64_t n = 20000;
  Rng rng(60601);
  for (const auto& [rate, inv] :
       {std::pair{1.0, 0.0}, std::pair{1.0, 4.0}, std::pair{2.3, 0.9}}) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = betafield::sample_gig_half(rate, inv, rng);
    const double d = vrjplab::ks_statistic(xs, [r = rate, c = inv](double x) {
      return betafield::gig_half_cdf(x, r, c);
    });
    CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
  }
}

TEST_CASE("reciprocal of gig_half is inverse gaussian") {
  // h ~ gig_half(rate=1, inv=4)  =>  1/h ~ IG(mu = 1/2, lambda = 1).
  const std::uint64_t n = 20000;
  Rng rng(515151);
  std::vector<double> recip(n);
  for (auto& x : recip) x = 1.0 / betafield::sample_gig_half(1.0, 4.0, rng);
  const double d = vrjplab::ks_statistic(recip, [](double x) {
    return vrjplab::inverse_gaussian_cdf(x, 0.5, 1.0);
  });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
}

TEST_CASE("sample_beta single vertex") {
  const std::uint64_t n = 30000;
  SymMatrix w(1);
  Rng rng(321);
  std::vector<double> twob(n);
  for (auto& x : twob) {
    const auto s = betafield::sample_beta(w, betafield::EtaVector::zero(1), rng);
    x = 2.0 * s.beta[0];
  }
  const auto est = vrjplab::mc_estimate(twob);
  CHECK(std::fabs(est.mean - 1.0) < 3.0 * est.std_error);
  const double d = vrjplab::ks_statistic(
      twob, [](double x) { return vrjplab::gamma_cdf(x, 0.5, 0.5); });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
}

TEST_CASE("sample_beta first-pivot marginal is exact") {
  // Path 0-1-2, weights (1.2, 0.7), tilt eta = (0.5, 0, 0.3). The marginal
  // of 2*beta_0 is the one-dimensional law with rate 1 and inverse
  // coefficient (eta_0 + W(0,1))^2.
  const std::uint64_t n = 20000;
  SymMatrix w(3);
  w.set(0, 1, 1.2);
  w.set(1, 2, 0.7);
  const betafield::EtaVector eta({0.5, 0.0, 0.3});
  const double eta_hat0 = 0.5 + 1.2;
  Rng rng(888);
  std::vector<double> first(n);
  for (auto& x : first) {
    const auto s = betafield::sample_beta(w, eta, rng);
    x = 2.0 * s.beta[0];
  }
  const double d = vrjplab::ks_statistic(first, [&](double x) {
    return betafield::gig_half_cdf(x, 1.0, eta_hat0 * eta_hat0);
  });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
}

TEST_CASE("sample_beta marginals do not depend on elimination order") {
  const std::uint64_t n = 15000;
  SymMatrix w(3);
  w.set(0, 1, 1.0);
  w.set(1, 2, 1.0);
  w.set(0, 2, 0.5);
  const betafield::EtaVector eta({0.2, 0.0, 0.9});
  const std::vector<int> fwd = {0, 1, 2};
  const std::vector<int> rev = {2, 1, 0};
  Rng rng_a(1001), rng_b(1002);
  std::vector<double> mid_a(n), mid_b(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    mid_a[i] = betafield::sample_beta(w, eta, rng_a, &fwd).beta[1];
    mid_b[i] = betafield::sample_beta(w, eta, rng_b, &rev).beta[1];
  }
  const auto rep =
      vrjplab::ks_test_two("order independence", mid_a, mid_b, 0.001, 1001, "");
  CHECK(rep.pass);
}

TEST_CASE("sample_beta validates the order argument") {
  SymMatrix w(2);
  w.set(0, 1, 1.0);
  Rng rng(5);
  const std::vector<int> dup = {0, 0};
  CHECK_THROWS_AS(
      betafield::sample_beta(w, betafield::EtaVector::zero(2), rng, &dup),
      vrjplab::ConfigError);
  const std::vector<int> short_order = {0};
  CHECK_THROWS_AS(betafield::sample_beta(w, betafield::EtaVector::zero(2), rng,
                                         &short_order),
                  vrjplab::DimensionError);
  const betafield::EtaVector bad_eta({1.0});
  CHECK_THROWS_AS(betafield::sample_beta(w, bad_eta, rng),
                  vrjplab::DimensionError);
}

TEST_CASE("elimination steps replay the Schur recursion") {
  SymMatrix w(3);
  w.set(0, 1, 1.5);
  w.set(1, 2, 0.4);
  w.set(0, 2, 0.9);
  const betafield::EtaVector eta({0.1, 0.2, 0.3});
  Rng rng(777);
  std::vector<betafield::EliminationStep> steps;
  const std::vector<int> order = {1, 2, 0};
  const auto s = betafield::sample_beta(w, eta, rng, &order, &steps);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].pivot == 1);
  CHECK(steps[1].pivot == 2);
  CHECK(steps[2].pivot == 0);
  // First pivot: no accumulated weight or tilt yet.
  CHECK(steps[0].self_weight == 0.0);
  CHECK(steps[0].eta_eff == doctest::Approx(0.2));
  CHECK(steps[0].eta_hat == doctest::Approx(0.2 + 1.5 + 0.4));
  for (const auto& st : steps) {
    // The conditional law lives on 2*beta - self_weight > 0.
    CHECK(2.0 * s.beta[st.pivot] > st.self_weight);
    REQUIRE(st.schur_update.size() == 3);
  }
  // Replay the first rank-one update: the second pivot's accumulated
  // self-weight must equal the replayed entry.
  const double h0 = 2.0 * s.beta[1] - steps[0].self_weight;
  const double upd_22 = steps[0].schur_update[2] * steps[0].schur_update[2];
  CHECK(upd_22 == doctest::Approx(w(1, 2) * w(1, 2) / h0).epsilon(1e-12));
  CHECK(steps[1].self_weight == doctest::Approx(upd_22).epsilon(1e-12));
}

TEST_CASE("h_from_beta and green closed forms") {
  SymMatrix w(2);
  w.set(0, 1, 1.0);
  const auto h = betafield::h_from_beta(w, {1.0, 1.0}, 42);
  CHECK(h.sample_id == 42);
  CHECK(h.m(0, 0) == 2.0);
  CHECK(h.m(1, 1) == 2.0);
  CHECK(h.m(0, 1) == -1.0);
  const auto g = betafield::green(h);
  CHECK(g.sample_id == 42);
  CHECK(g.m(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(g.m(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // Off-support potential: green must refuse.
  const auto bad = betafield::h_from_beta(w, {0.1, 0.1});
  CHECK_THROWS_AS(betafield::green(bad), vrjplab::NotPositiveDefiniteError);
}

TEST_CASE("green entries are nonnegative on sampled potentials") {
  SymMatrix w(4);
  w.set(0, 1, 1.0);
  w.set(1, 2, 2.0);
  w.set(2, 3, 0.5);
  w.set(0, 3, 1.5);
  Rng rng(31415);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = betafield::sample_beta(w, betafield::EtaVector::zero(4), rng);
    const auto g = betafield::green(betafield::h_from_beta(s));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) CHECK(g.m(i, j) > 0.0);
  }
}
