#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "vrjplab/betafield.hpp"
#include "vrjplab/coupling.hpp"
#include "vrjplab/distributions.hpp"
#include "vrjplab/experiments.hpp"
#include "vrjplab/linalg.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/stats.hpp"

using vrjplab::Rng;
using vrjplab::linalg::SymMatrix;
namespace betafield = vrjplab::betafield;
namespace coupling = vrjplab::coupling;

namespace {

template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("beta_to_gammaz symmetric example") {
  // beta = (1,1), w = 1, lambda = 1/2: H = [[2,-1],[-1,2]], gamma = 2, Z = 1,
  // and det H = w_tilde * gamma * 1 = 1.5 * 2.
  const auto gz = coupling::beta_to_gammaz(1.0, 1.0, 1.0, 0.5);
  CHECK(gz.gamma == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gz.z == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gz.lambda == 0.5);
  CHECK(gz.w == 1.0);
  const double w_tilde = gz.w + gz.lambda * (1.0 - gz.lambda) * gz.gamma;
  CHECK(w_tilde * gz.gamma == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("beta_to_gammaz swap symmetry") {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const double w = 0.2 + rng.uniform();
    const double lambda = 0.1 + 0.8 * rng.uniform();
    // stay on support: 4 b1 b2 > w^2
    const double b1 = 0.5 * w + 0.2 + rng.uniform();
    const double b2 = 0.5 * w + 0.2 + rng.uniform();
    const auto gz = coupling::beta_to_gammaz(b1, b2, w, lambda);
    const auto sw = coupling::beta_to_gammaz(b2, b1, w, 1.0 - lambda);
    CHECK(sw.gamma == doctest::Approx(gz.gamma).epsilon(1e-12));
    CHECK(sw.z == doctest::Approx(1.0 / gz.z).epsilon(1e-12));
  }
}

TEST_CASE("beta_to_gammaz validates input") {
  CHECK_THROWS_AS(coupling::beta_to_gammaz(0.1, 0.1, 1.0, 0.5),
                  vrjplab::NotPositiveDefiniteError);
  CHECK_THROWS_AS(coupling::beta_to_gammaz(1.0, 1.0, -1.0, 0.5),
                  vrjplab::ConfigError);
  CHECK_THROWS_AS(coupling::beta_to_gammaz(1.0, 1.0, 1.0, 1.5),
                  vrjplab::ConfigError);
  CHECK_THROWS_AS(coupling::beta_to_gammaz(1.0, 1.0, 0.0, 0.0),
                  vrjplab::ConfigError);
}

TEST_CASE("gammaz_to_beta inverts the change of variables") {
  Rng rng(21);
  for (int rep = 0; rep < 2000; ++rep) {
    const double w = rng.uniform() < 0.2 ? 0.0 : 0.2 + 2.0 * rng.uniform();
    const double lambda =
        w == 0.0 ? 0.1 + 0.8 * rng.uniform() : 0.9 * rng.uniform() + 0.05;
    const double b1 = 0.5 * w + 0.05 + 1.5 * rng.uniform();
    const double b2 = 0.5 * w + 0.05 + 1.5 * rng.uniform();
    if (4.0 * b1 * b2 <= w * w) continue;
    const auto gz = coupling::beta_to_gammaz(b1, b2, w, lambda);
    const auto [r1, r2] = coupling::gammaz_to_beta(gz);
    CHECK(r1 == doctest::Approx(b1).epsilon(1e-10));
    CHECK(r2 == doctest::Approx(b2).epsilon(1e-10));
  }
}

TEST_CASE("z equal one forces the rank-one direction") {
  // At Z = 1, 2(b1 - b2) = (2 lambda - 1) gamma.
  const coupling::GammaZ gz{1.7, 1.0, 0.3, 0.9};
  const auto [b1, b2] = coupling::gammaz_to_beta(gz);
  CHECK(2.0 * (b1 - b2) ==
        doctest::Approx((2.0 * 0.3 - 1.0) * 1.7).epsilon(1e-13));
}

TEST_CASE("gamma carries a rank-one degeneracy") {
  // H - gamma y y^T with y = (lambda, 1-lambda) is singular: det vanishes.
  Rng rng(33);
  for (int rep = 0; rep < 200; ++rep) {
    const double w = 0.3 + rng.uniform();
    const double lambda = 0.05 + 0.9 * rng.uniform();
    const double b1 = 0.5 * w + 0.1 + rng.uniform();
    const double b2 = 0.5 * w + 0.1 + rng.uniform();
    const auto gz = coupling::beta_to_gammaz(b1, b2, w, lambda);
    const double y0 = lambda, y1 = 1.0 - lambda;
    const double a = 2.0 * b1 - gz.gamma * y0 * y0;
    const double b = -w - gz.gamma * y0 * y1;
    const double d = 2.0 * b2 - gz.gamma * y1 * y1;
    const double scale = std::max({std::fabs(a), std::fabs(b), std::fabs(d)});
    CHECK(std::fabs(a * d - b * b) <= 1e-10 * std::max(1.0, scale * scale));
  }
}

TEST_CASE("tilted density integrates to one and matches its cdf") {
  for (const auto& [k, delta] :
       {std::pair{1.0, 0.0}, std::pair{0.5, 1.0}, std::pair{2.0, -0.7}}) {
    const coupling::TiltedParams p{k, delta};
    const double lim = 10.0 / std::sqrt(k);
    const auto pdf = [&](double u) { return coupling::tilted_pdf(p, u); };
    CHECK(simpson(pdf, -lim, lim, 8000) == doctest::Approx(1.0).epsilon(1e-9));
    for (const double u : {-1.5, -0.2, 0.0, 0.4, 2.1}) {
      const double via_quad = simpson(pdf, -lim, u, 8000);
      CHECK(coupling::tilted_cdf(p, u) ==
            doctest::Approx(via_quad).epsilon(1e-7));
    }
  }
}

TEST_CASE("tilted cdf edge behavior") {
  const coupling::TiltedParams p{1.3, 0.6};
  CHECK(coupling::tilted_cdf(p, -40.0) == doctest::Approx(0.0));
  CHECK(coupling::tilted_cdf(p, 40.0) == doctest::Approx(1.0));
  // delta = 0 reduces to the centered Gaussian with variance 1/k.
  const coupling::TiltedParams g{2.0, 0.0};
  for (const double u : {-1.0, 0.3, 1.7})
    CHECK(coupling::tilted_cdf(g, u) ==
          doctest::Approx(vrjplab::norm_cdf(u * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("sample_tilted matches the tilted law") {
  const std::uint64_t n = 20000;
  Rng rng(7117);
  for (const auto& [k, delta] :
       {std::pair{1.0, 0.8}, std::pair{3.0, -1.0}, std::pair{0.7, 0.0}}) {
    const coupling::TiltedParams p{k, delta};
    std::vector<double> us(n);
    for (auto& u : us) u = coupling::sample_tilted(p, rng);
    const double d = vrjplab::ks_statistic(
        us, [&p](double u) { return coupling::tilted_cdf(p, u); });
    CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
  }
}

TEST_CASE("absolute value of a tilted draw ignores the tilt") {
  const std::uint64_t n = 20000;
  Rng rng(7227);
  std::vector<double> abs_tilted(n), abs_flat(n);
  const coupling::TiltedParams tilted{1.0, 1.0};
  const coupling::TiltedParams flat{1.0, 0.0};
  for (std::uint64_t i = 0; i < n; ++i) {
    abs_tilted[i] = std::fabs(coupling::sample_tilted(tilted, rng));
    abs_flat[i] = std::fabs(coupling::sample_tilted(flat, rng));
  }
  CHECK(vrjplab::ks_test_two("abs tilt", abs_tilted, abs_flat, 0.001, 7227, "")
            .pass);
}

TEST_CASE("mean of z under the tilted law") {
  // E[z(U)] = 1 + (1 + delta) / (2k).
  const std::uint64_t n = 60000;
  Rng rng(4321);
  for (const auto& [k, delta] :
       {std::pair{1.0, 0.0}, std::pair{2.0, 1.0}, std::pair{1.5, -0.4}}) {
    const coupling::TiltedParams p{k, delta};
    std::vector<double> zs(n);
    for (auto& z : zs) z = coupling::z_from_u(coupling::sample_tilted(p, rng));
    const auto est = vrjplab::mc_estimate(zs);
    CHECK(std::fabs(est.mean - (1.0 + (1.0 + delta) / (2.0 * k))) <
          3.5 * est.std_error);
  }
}

TEST_CASE("tilted_ratio_mean is one") {
  Rng rng(9999);
  for (const auto& [delta, delta_prime] :
       {std::pair{0.0, 1.0}, std::pair{1.0, -1.0}, std::pair{0.5, -0.5}}) {
    const coupling::TiltedParams p{1.0, delta};
    Rng local(rng.next_u64());
    const auto est = coupling::tilted_ratio_mean(p, delta_prime, 40000, local);
    CHECK(std::fabs(est.mean - 1.0) < 3.5 * est.std_error);
  }
  // delta_prime = delta: the ratio is identically one.
  const coupling::TiltedParams p{2.0, 0.3};
  const auto exact = coupling::tilted_ratio_mean(p, 0.3, 100, rng);
  CHECK(exact.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exact.std_error == doctest::Approx(0.0));
}

TEST_CASE("z_from_u basic identities") {
  CHECK(coupling::z_from_u(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  Rng rng(55);
  for (int i = 0; i < 200; ++i) {
    const double u = 6.0 * (rng.uniform() - 0.5);
    const double z = coupling::z_from_u(u);
    CHECK(z > 0.0);
    // inverse map u = sqrt(z) - 1/sqrt(z)
    CHECK(std::sqrt(z) - 1.0 / std::sqrt(z) ==
          doctest::Approx(u).epsilon(1e-12));
    // reflection u -> -u inverts z
    CHECK(coupling::z_from_u(-u) == doctest::Approx(1.0 / z).epsilon(1e-12));
  }
}

TEST_CASE("couple_tilted equal weights collapse the pair") {
  Rng rng(606);
  for (int i = 0; i < 50; ++i) {
    const auto c = coupling::couple_tilted(1.4, 1.4, 0.25, rng);
    CHECK(c.u_minus == c.u_plus);
    CHECK(c.p_plus == doctest::Approx(1.0));
    CHECK(c.p_minus == doctest::Approx(0.0));
  }
}

TEST_CASE("couple_tilted scales energies exactly") {
  Rng rng(607);
  for (int i = 0; i < 500; ++i) {
    const auto c = coupling::couple_tilted(1.0, 4.0, -0.3, rng);
    CHECK(std::fabs(c.u_minus) == doctest::Approx(2.0 * std::fabs(c.u_plus)));
    // exact by construction, not approximate
    CHECK(c.k_minus * c.u_minus * c.u_minus ==
          c.k_plus * c.u_plus * c.u_plus);
    CHECK(c.p_plus + c.p_minus == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.p_plus >= 0.0);
    CHECK(c.p_minus >= 0.0);
  }
  CHECK_THROWS_AS(coupling::couple_tilted(2.0, 1.0, 0.0, rng),
                  vrjplab::ConfigError);
}

TEST_CASE("couple_tilted marginals are the tilted laws") {
  const std::uint64_t n = 20000;
  const double k_minus = 0.8, k_plus = 2.5, delta = 0.6;
  Rng rng(608);
  std::vector<double> minus(n), plus(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto c = coupling::couple_tilted(k_minus, k_plus, delta, rng);
    minus[i] = c.u_minus;
    plus[i] = c.u_plus;
  }
  const coupling::TiltedParams pm{k_minus, delta};
  const coupling::TiltedParams pp{k_plus, delta};
  double d = vrjplab::ks_statistic(
      plus, [&](double u) { return coupling::tilted_cdf(pp, u); });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
  d = vrjplab::ks_statistic(
      minus, [&](double u) { return coupling::tilted_cdf(pm, u); });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
}

TEST_CASE("resample_minus_given_plus hits the stored mixture") {
  Rng rng(609);
  const auto c = coupling::couple_tilted(1.0, 3.0, 0.9, rng);
  const double root = std::sqrt(3.0) * std::fabs(c.u_plus);
  int plus_hits = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double u = coupling::resample_minus_given_plus(c, rng);
    CHECK(std::fabs(u) == doctest::Approx(root).epsilon(1e-12));
    if ((u > 0.0) == (c.u_plus > 0.0)) ++plus_hits;
  }
  const double freq = static_cast<double>(plus_hits) / n;
  const double se = std::sqrt(c.p_plus * (1.0 - c.p_plus) / n);
  CHECK(std::fabs(freq - c.p_plus) < 3.5 * std::max(se, 1e-4));
}

TEST_CASE("reduce_quadratic with a detached inner block") {
  // H12 = 0: alphas reduce to the boundary entries of x, the self terms to
  // inner quadratic forms.
  SymMatrix h(2);
  h.set(0, 0, 2.0);
  h.set(1, 1, 3.0);
  h.set(0, 1, -1.0);
  const betafield::HMatrix h11{h, 0};
  const std::vector<double> zero_col(2, 0.0);
  const std::vector<double> x1 = {1.0, 2.0, 0.7, 0.0};
  const std::vector<double> x2 = {0.0, 1.0, 0.0, 1.3};
  const auto rp = coupling::reduce_quadratic(h11, zero_col, zero_col, x1, x2);
  CHECK(rp.f1.alpha1 == doctest::Approx(0.7));
  CHECK(rp.f1.alpha2 == doctest::Approx(0.0));
  CHECK(rp.f2.alpha1 == doctest::Approx(0.0));
  CHECK(rp.f2.alpha2 == doctest::Approx(1.3));
  const std::vector<double> x1_in = {1.0, 2.0};
  const std::vector<double> x2_in = {0.0, 1.0};
  CHECK(rp.f1.c ==
        doctest::Approx(vrjplab::linalg::quad_form_pd_ext(h, x1_in, x1_in))
            .epsilon(1e-13));
  CHECK(rp.f2.c ==
        doctest::Approx(vrjplab::linalg::quad_form_pd_ext(h, x2_in, x2_in))
            .epsilon(1e-13));
  CHECK(rp.c_cross ==
        doctest::Approx(vrjplab::linalg::quad_form_pd_ext(h, x1_in, x2_in))
            .epsilon(1e-13));
}

TEST_CASE("reduce_quadratic matches a full assembly") {
  // One inner vertex, boundary pair, arbitrary PD completion of the pair
  // block: x^T G y must equal c_cross + alpha(x)^T G22 alpha(y).
  SymMatrix h(1);
  h.set(0, 0, 2.5);
  const betafield::HMatrix h11{h, 0};
  const std::vector<double> col1 = {-0.8};
  const std::vector<double> col2 = {-0.3};
  const std::vector<double> x1 = {1.0, 0.5, 2.0};
  const std::vector<double> x2 = {0.3, 1.0, 0.0};
  const auto rp = coupling::reduce_quadratic(h11, col1, col2, x1, x2);

  // Complete with pair block [[3.0, -0.6], [-0.6, 2.2]].
  SymMatrix full(3);
  full.set(0, 0, 2.5);
  full.set(0, 1, -0.8);
  full.set(0, 2, -0.3);
  full.set(1, 1, 3.0);
  full.set(2, 2, 2.2);
  full.set(1, 2, -0.6);
  const double direct = vrjplab::linalg::quad_form_pd_ext(full, x1, x2);

  // Schur complement of the inner block.
  const double m1 = 0.8 / 2.5, m2 = 0.3 / 2.5;
  SymMatrix s(2);
  s.set(0, 0, 3.0 - 0.8 * m1);
  s.set(1, 1, 2.2 - 0.3 * m2);
  s.set(0, 1, -0.6 - 0.8 * m2);
  const std::vector<double> a1 = {rp.f1.alpha1, rp.f1.alpha2};
  const std::vector<double> a2 = {rp.f2.alpha1, rp.f2.alpha2};
  const double reduced =
      rp.c_cross + vrjplab::linalg::quad_form_pd_ext(s, a1, a2);
  CHECK(reduced == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("reduce_quadratic validates signs and sizes") {
  SymMatrix h(1);
  h.set(0, 0, 2.0);
  const betafield::HMatrix h11{h, 0};
  const std::vector<double> good = {-0.5};
  const std::vector<double> positive = {0.5};
  const std::vector<double> x = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(coupling::reduce_quadratic(h11, positive, good, x, x),
                  vrjplab::ConfigError);
  const std::vector<double> short_x = {1.0, 1.0};
  CHECK_THROWS_AS(coupling::reduce_quadratic(h11, good, good, short_x, x),
                  vrjplab::DimensionError);
  const std::vector<double> neg_x = {1.0, -1.0, 1.0};
  CHECK_THROWS_AS(coupling::reduce_quadratic(h11, good, good, neg_x, x),
                  vrjplab::ConfigError);
}

TEST_CASE("pair_betas satisfies the determinant identity") {
  // For a standalone pair (no inner block), w_tilde = w + lambda(1-lambda)
  // gamma and det of the assembled pair block factors through the direction.
  Rng rng(1212);
  for (int rep = 0; rep < 300; ++rep) {
    const double gamma = 0.1 + 3.0 * rng.uniform();
    const double lambda = 0.05 + 0.9 * rng.uniform();
    const double w = 0.2 + 2.0 * rng.uniform();
    const double u = 4.0 * (rng.uniform() - 0.5);
    const double w_tilde = w + lambda * (1.0 - lambda) * gamma;
    const auto b = coupling::pair_betas(gamma, lambda, w_tilde, u);
    const double z = coupling::z_from_u(u);
    CHECK(b[0] ==
          doctest::Approx(lambda * lambda * gamma + w_tilde / z).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx((1.0 - lambda) * (1.0 - lambda) * gamma +
                                  w_tilde * z)
                      .epsilon(1e-12));
    const double det = b[0] * b[1] - w * w;
    const double root =
        lambda * std::sqrt(z) + (1.0 - lambda) / std::sqrt(z);
    CHECK(det ==
          doctest::Approx(w_tilde * gamma * root * root).epsilon(1e-10));
    // corrupted orientation: both coordinates see the same z
    const auto bad = coupling::pair_betas(gamma, lambda, w_tilde, u, true);
    CHECK(bad[0] == doctest::Approx(lambda * lambda * gamma + w_tilde * z)
                        .epsilon(1e-12));
    CHECK(bad[1] == b[1]);
  }
}

TEST_CASE("pair_block_form matches the explicit 2x2 inverse") {
  Rng rng(1313);
  for (int rep = 0; rep < 200; ++rep) {
    const double w = 0.2 + rng.uniform();
    const double b1 = w + 0.1 + rng.uniform();
    const double b2 = w + 0.1 + rng.uniform();
    SymMatrix s(2);
    s.set(0, 0, b1);
    s.set(1, 1, b2);
    s.set(0, 1, -w);
    const std::vector<double> a = {rng.uniform(), rng.uniform()};
    const std::vector<double> b = {rng.uniform(), rng.uniform()};
    const double via_solver = vrjplab::linalg::quad_form_pd_ext(s, a, b);
    const double direct =
        coupling::pair_block_form(b1, b2, w, a[0], a[1], b[0], b[1]);
    CHECK(direct == doctest::Approx(via_solver).epsilon(1e-12));
  }
}

TEST_CASE("sample_inner single vertex law") {
  // One inner vertex with boundary weights (a, b): its potential has the
  // one-dimensional law with inverse coefficient (a + b)^2.
  const std::uint64_t n = 20000;
  SymMatrix w_inner(1);
  const std::vector<double> w1 = {0.6};
  const std::vector<double> w2 = {0.9};
  Rng rng(1414);
  std::vector<double> diag(n);
  for (auto& d : diag) {
    const auto h = coupling::sample_inner(w_inner, w1, w2, rng);
    REQUIRE(h.m.dim() == 1);
    d = h.m(0, 0);
  }
  const double d = vrjplab::ks_statistic(diag, [](double x) {
    return betafield::gig_half_cdf(x, 1.0, 1.5 * 1.5);
  });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
  const auto est = vrjplab::mc_estimate(diag);
  CHECK(std::fabs(est.mean - 2.5) < 3.5 * est.std_error);
}

TEST_CASE("couple_triple with no inner vertices") {
  // w_minus = 1, w_plus = 2, x1 = (1,1): lambda = 1/2, delta = 0, K = 0, and
  // all three quadratic forms equal 4/gamma draw by draw.
  betafield::HMatrix h0{SymMatrix(0), 0};
  Rng rng(1515);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = coupling::couple_triple(h0, {}, {}, 1.0, 2.0, {1.0, 1.0},
                                           rng);
    CHECK(t.lambda == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.delta == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(t.k_form == 0.0);
    const double target = 4.0 / t.gamma;
    const std::vector<double> x1 = {1.0, 1.0};
    const std::vector<double> xbar = {2.0};
    CHECK(vrjplab::linalg::quad_form_pd_ext(t.h_minus.m, x1, x1) ==
          doctest::Approx(target).epsilon(1e-11));
    CHECK(vrjplab::linalg::quad_form_pd_ext(t.h_plus.m, x1, x1) ==
          doctest::Approx(target).epsilon(1e-11));
    CHECK(vrjplab::linalg::quad_form_pd_ext(t.h_inf.m, xbar, xbar) ==
          doctest::Approx(target).epsilon(1e-11));
  }
}

TEST_CASE("couple_triple assembles the documented blocks") {
  const auto cfg = vrjplab::experiments::standard_triple_config();
  const int n = cfg.w_inner.dim();
  Rng rng(1616);
  const betafield::HMatrix inner =
      coupling::sample_inner(cfg.w_inner, cfg.w1, cfg.w2, rng);
  const auto t = coupling::couple_triple(inner, cfg.w1, cfg.w2, cfg.w_minus,
                                         cfg.w_plus, cfg.x1, rng);

  // Inner blocks of all three matrices are the shared potential.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      CHECK(t.h_minus.m(i, j) == t.shared_h.m(i, j));
      CHECK(t.h_plus.m(i, j) == t.shared_h.m(i, j));
      CHECK(t.h_inf.m(i, j) == t.shared_h.m(i, j));
    }
  }
  // Boundary columns carry -w1, -w2; the merged column their sum.
  for (int i = 0; i < n; ++i) {
    CHECK(t.h_minus.m(i, n) == -cfg.w1[i]);
    CHECK(t.h_minus.m(i, n + 1) == -cfg.w2[i]);
    CHECK(t.h_plus.m(i, n) == -cfg.w1[i]);
    CHECK(t.h_plus.m(i, n + 1) == -cfg.w2[i]);
    CHECK(t.h_inf.m(i, n) == doctest::Approx(-(cfg.w1[i] + cfg.w2[i])));
  }
  // Pair rows: off-diagonal is the raw modified weight, diagonals are the
  // pair potentials shifted by the Schur self terms.
  CHECK(t.h_minus.m(n, n + 1) == -cfg.w_minus);
  CHECK(t.h_plus.m(n, n + 1) == -cfg.w_plus);
  CHECK(t.h_minus.m(n, n) ==
        doctest::Approx(2.0 * t.beta_tilde_minus[0] + t.q1).epsilon(1e-13));
  CHECK(t.h_minus.m(n + 1, n + 1) ==
        doctest::Approx(2.0 * t.beta_tilde_minus[1] + t.q2).epsilon(1e-13));
  CHECK(t.h_plus.m(n, n) ==
        doctest::Approx(2.0 * t.beta_tilde_plus[0] + t.q1).epsilon(1e-13));
  CHECK(t.h_plus.m(n + 1, n + 1) ==
        doctest::Approx(2.0 * t.beta_tilde_plus[1] + t.q2).epsilon(1e-13));
  CHECK(t.h_inf.m(n, n) == doctest::Approx(t.gamma + t.q3).epsilon(1e-13));

  // Construction invariants.
  CHECK(t.q3 == doctest::Approx(t.q1 + 2.0 * t.k_form + t.q2).epsilon(1e-12));
  CHECK(t.w_tilde_minus ==
        doctest::Approx(t.k_form + cfg.w_minus +
                        t.lambda * (1.0 - t.lambda) * t.gamma)
            .epsilon(1e-13));
  CHECK(t.w_tilde_plus ==
        doctest::Approx(t.k_form + cfg.w_plus +
                        t.lambda * (1.0 - t.lambda) * t.gamma)
            .epsilon(1e-13));
  CHECK(t.z_minus == doctest::Approx(coupling::z_from_u(t.u_couple.u_minus))
                         .epsilon(1e-13));
  CHECK(t.z_plus == doctest::Approx(coupling::z_from_u(t.u_couple.u_plus))
                        .epsilon(1e-13));
  CHECK(t.delta == doctest::Approx(2.0 * t.lambda - 1.0).epsilon(1e-13));
}

TEST_CASE("couple_triple validates its configuration") {
  betafield::HMatrix h0{SymMatrix(0), 0};
  Rng rng(1717);
  CHECK_THROWS_AS(
      coupling::couple_triple(h0, {}, {}, 2.0, 1.0, {1.0, 1.0}, rng),
      vrjplab::ConfigError);  // w_minus > w_plus
  CHECK_THROWS_AS(coupling::couple_triple(h0, {}, {}, 1.0, 2.0, {1.0}, rng),
                  vrjplab::DimensionError);  // x1 length
  CHECK_THROWS_AS(
      coupling::couple_triple(h0, {}, {}, 1.0, 2.0, {1.0, -1.0}, rng),
      vrjplab::ConfigError);  // negative construction vector
  CHECK_THROWS_AS(
      coupling::couple_triple(h0, {0.5}, {}, 1.0, 2.0, {1.0, 1.0}, rng),
      vrjplab::DimensionError);  // boundary length mismatch
}

TEST_CASE("audit_triple accepts faithful draws") {
  const auto cfg = vrjplab::experiments::standard_triple_config();
  Rng rng(1818);
  for (int rep = 0; rep < 100; ++rep) {
    const auto inner = coupling::sample_inner(cfg.w_inner, cfg.w1, cfg.w2, rng);
    const auto t = coupling::couple_triple(inner, cfg.w1, cfg.w2, cfg.w_minus,
                                           cfg.w_plus, cfg.x1, rng);
    const auto audit = coupling::audit_triple(t);
    CHECK(audit.three_way_stable <= 1e-9);
    CHECK(audit.energy_err <= 1e-9);
    CHECK(audit.diag_err == 0.0);
    CHECK(audit.three_way_matrix <= audit.cond_tol);
    CHECK(audit.matrix_vs_stable <= audit.cond_tol);
    CHECK(audit.det_err <= audit.det_tol);
    CHECK(audit.gamma == t.gamma);
    CHECK(audit.det_minus > 0.0);
    CHECK(audit.det_plus > 0.0);
    CHECK(audit.kappa_hat >= 1.0);
  }
}

TEST_CASE("negative-control variants break the faithful structure") {
  const auto cfg = vrjplab::experiments::standard_triple_config();
  const int n = cfg.w_inner.dim();
  Rng rng(1919);
  // Draw until the transverse variable is visibly away from u = 0, where the
  // two orientations coincide.
  for (int rep = 0; rep < 50; ++rep) {
    Rng rng_a(rng.next_u64());
    Rng rng_b(rng_a);  // identical stream: same gamma, same u
    const auto inner = coupling::sample_inner(cfg.w_inner, cfg.w1, cfg.w2,
                                              rng_a);
    const auto inner_b = inner;
    const auto faithful = coupling::couple_triple(
        inner, cfg.w1, cfg.w2, cfg.w_minus, cfg.w_plus, cfg.x1, rng_a);
    const auto corrupted = coupling::couple_triple(
        inner_b, cfg.w1, cfg.w2, cfg.w_minus, cfg.w_plus, cfg.x1, rng_b,
        coupling::TripleVariant::kSameZ);
    CHECK(corrupted.variant == coupling::TripleVariant::kSameZ);
    if (std::fabs(faithful.u_couple.u_minus) < 0.2) continue;
    CHECK(corrupted.h_minus.m(n, n) != faithful.h_minus.m(n, n));
  }
}

TEST_CASE("ratio_form closed values and the bilinear identity") {
  // Z = 1 collapses to 1/gamma regardless of the angles.
  const coupling::GammaZ one{2.0, 1.0, 0.5, 0.7};
  CHECK(coupling::ratio_form(one, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  const coupling::GammaZ skew{3.0, 1.0, 0.2, 0.4};
  CHECK(coupling::ratio_form(skew, 0.9) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  // General case against the explicit 2x2 solve.
  Rng rng(2020);
  for (int rep = 0; rep < 200; ++rep) {
    const double w = 0.2 + rng.uniform();
    const double lambda = 0.05 + 0.9 * rng.uniform();
    const double theta = 0.05 + 0.9 * rng.uniform();
    const double b1 = 0.5 * w + 0.1 + rng.uniform();
    const double b2 = 0.5 * w + 0.1 + rng.uniform();
    const auto gz = coupling::beta_to_gammaz(b1, b2, w, lambda);
    SymMatrix s(2);
    s.set(0, 0, 2.0 * b1);
    s.set(1, 1, 2.0 * b2);
    s.set(0, 1, -w);
    const std::vector<double> lam_vec = {lambda, 1.0 - lambda};
    const std::vector<double> theta_vec = {theta, 1.0 - theta};
    const double direct =
        vrjplab::linalg::quad_form_pd_ext(s, lam_vec, theta_vec);
    CHECK(coupling::ratio_form(gz, theta) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
}
