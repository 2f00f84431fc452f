#include "vrjplab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "vrjplab/betafield.hpp"
#include "vrjplab/distributions.hpp"
#include "vrjplab/electrical.hpp"
#include "vrjplab/errors.hpp"
#include "vrjplab/processes.hpp"

namespace vrjplab::experiments {
namespace {

using json = nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 20250817ULL;

TestReport make_report(std::string name, double statistic, double threshold,
                       bool pass, std::uint64_t seed, std::string params) {
  TestReport r;
  r.test = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.pass = pass;
  r.seed = seed;
  r.params = std::move(params);
  return r;
}

// Weight matrix for g's topology with the edge weights replaced by w_edges
// (parallel to g.edges()).
linalg::SymMatrix edge_weight_matrix(const graphs::WeightedGraph& g,
                                     const std::vector<double>& w_edges) {
  const auto& edges = g.edges();
  if (w_edges.size() != edges.size()) {
    throw DimensionError("edge weight vector size " +
                         std::to_string(w_edges.size()) +
                         " does not match edge count " +
                         std::to_string(edges.size()));
  }
  linalg::SymMatrix w(g.n_vertices());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!(w_edges[e] > 0.0) || !std::isfinite(w_edges[e])) {
      throw ConfigError("edge weights must be positive and finite");
    }
    w.set(edges[e].u, edges[e].v, w_edges[e]);
  }
  return w;
}

std::vector<double> negated(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

double uniform_cdf01(double u) { return std::clamp(u, 0.0, 1.0); }

std::string fmt_params(std::initializer_list<std::pair<const char*, std::string>>
                           kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ",";
    out += k;
    out += "=";
    out += v;
  }
  return out;
}

std::string u64s(std::uint64_t v) { return std::to_string(v); }

}  // namespace

// ---- convex order -----------------------------------------------------------

std::vector<FunctionSpec> default_convex_family() {
  std::vector<FunctionSpec> fam;
  fam.push_back({"square", [](double x) { return x * x; }, true});
  fam.push_back({"exp_neg", [](double x) { return std::exp(-x); }, true});
  fam.push_back(
      {"hinge10", [](double x) { return std::max(1.0 - 10.0 * x, 0.0); },
       true});
  fam.push_back({"linear", [](double x) { return x; }, false});
  return fam;
}

ConvexOrderResult convex_order_experiment(
    const graphs::WeightedGraph& g, const std::vector<double>& w_minus_edges,
    const std::vector<double>& w_plus_edges, int i,
    const std::vector<double>& x, const std::vector<FunctionSpec>& f_family,
    std::uint64_t n, std::uint64_t seed, int threads) {
  if (n == 0) throw ConfigError("replicate count must be positive");
  if (i < 0 || i >= g.n_vertices()) {
    throw ConfigError("observation vertex out of range");
  }
  if (static_cast<int>(x.size()) != g.n_vertices()) {
    throw DimensionError("test vector size does not match vertex count");
  }
  for (double xv : x) {
    if (!(xv >= 0.0) || !std::isfinite(xv)) {
      throw ConfigError("test vector entries must be nonnegative and finite");
    }
  }
  if (f_family.empty()) throw ConfigError("empty test-function family");
  const linalg::SymMatrix wm = edge_weight_matrix(g, w_minus_edges);
  const linalg::SymMatrix wp = edge_weight_matrix(g, w_plus_edges);
  for (std::size_t e = 0; e < w_minus_edges.size(); ++e) {
    if (!(w_minus_edges[e] <= w_plus_edges[e])) {
      throw ConfigError("weights must satisfy w_minus <= w_plus edgewise");
    }
  }

  const auto sample_ratio = [&](const linalg::SymMatrix& w, std::uint64_t,
                                Rng& rng) {
    const auto bs = betafield::sample_beta(w, betafield::EtaVector::zero(w.dim()), rng);
    const auto gm = betafield::green(betafield::h_from_beta(bs));
    double num = 0.0;
    for (int j = 0; j < w.dim(); ++j) num += x[j] * gm.m(i, j);
    return num / gm.m(i, i);
  };

  const std::vector<double> vals_minus = replicate_map<double>(
      seed, "convex-order/minus", n, threads,
      [&](std::uint64_t r, Rng& rng) { return sample_ratio(wm, r, rng); });
  const std::vector<double> vals_plus = replicate_map<double>(
      seed, "convex-order/plus", n, threads,
      [&](std::uint64_t r, Rng& rng) { return sample_ratio(wp, r, rng); });

  ConvexOrderResult out;
  double min_convex_z = std::numeric_limits<double>::infinity();
  double max_linear_absz = 0.0;
  bool all_pass = true;
  std::vector<double> fm(n), fp(n);
  for (const auto& spec : f_family) {
    for (std::uint64_t r = 0; r < n; ++r) {
      fm[r] = spec.f(vals_minus[r]);
      fp[r] = spec.f(vals_plus[r]);
    }
    FunctionComparison row;
    row.fname = spec.name;
    row.convex = spec.convex;
    row.minus_est = mc_estimate(fm);
    row.plus_est = mc_estimate(fp);
    const double combined =
        std::sqrt(row.minus_est.std_error * row.minus_est.std_error +
                  row.plus_est.std_error * row.plus_est.std_error);
    const double diff = row.minus_est.mean - row.plus_est.mean;
    if (combined > 0.0) {
      row.z = diff / combined;
    } else {
      row.z = (std::abs(diff) <= 1e-12) ? 0.0
              : (diff > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity());
    }
    if (spec.convex) {
      // Larger weights concentrate the field: convex statistics must not
      // increase beyond MC noise when moving from w_minus to w_plus.
      row.pass = row.z >= -2.0;
      min_convex_z = std::min(min_convex_z, row.z);
    } else {
      row.pass = std::abs(row.z) <= 3.0;
      max_linear_absz = std::max(max_linear_absz, std::abs(row.z));
    }
    all_pass = all_pass && row.pass;
    out.rows.push_back(std::move(row));
  }
  out.report = make_report(
      "convex_order", min_convex_z, -2.0, all_pass, seed,
      fmt_params({{"n", u64s(n)},
                  {"i", std::to_string(i)},
                  {"rows", std::to_string(f_family.size())},
                  {"linear_max_absz", fmt_g17(max_linear_absz)}}));
  return out;
}

// ---- monotonicity scan -------------------------------------------------------

int lattice_center(int d, int side) {
  if (d < 1 || side < 1) throw ConfigError("invalid lattice dimensions");
  const int c = (side - 1) / 2;
  long long id = 0;
  for (int k = 0; k < d; ++k) id = id * side + c;
  return static_cast<int>(id);
}

ScanResult monotonicity_scan(int d, int side,
                             const std::vector<double>& weights, int x0,
                             std::uint64_t n, std::uint64_t seed,
                             int threads) {
  if (n == 0) throw ConfigError("replicate count must be positive");
  if (weights.empty()) throw ConfigError("empty weight list");
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
      throw ConfigError("weights must be positive and finite");
    }
    if (k > 0 && !(weights[k] > weights[k - 1])) {
      throw ConfigError("weights must be strictly increasing");
    }
  }

  ScanResult out;
  out.ms = {1, 10, 100};
  for (std::size_t wi = 0; wi < weights.size(); ++wi) {
    const auto g = graphs::lattice_box(d, side, weights[wi]);
    const int center = (x0 < 0) ? lattice_center(d, side) : x0;
    if (center >= g.n_vertices()) throw ConfigError("x0 out of range");
    const int radius = std::max(1, graphs::eccentricity(g, center) - 1);
    const auto q = graphs::ball_quotient(g, center, radius);
    const linalg::SymMatrix wq = graphs::weight_matrix(q.graph);
    const int x0q = q.projection[center];
    const int delta = q.merged_vertex;

    const std::vector<double> psis = replicate_map<double>(
        seed, "scan/w" + std::to_string(wi), n, threads,
        [&](std::uint64_t, Rng& rng) {
          const auto bs = betafield::sample_beta(
              wq, betafield::EtaVector::zero(wq.dim()), rng);
          const auto gm = betafield::green(betafield::h_from_beta(bs));
          return electrical::psi_ratio(gm, x0q, delta);
        });

    ScanRow row;
    row.w = weights[wi];
    std::vector<double> vals(n);
    for (int m : out.ms) {
      for (std::uint64_t r = 0; r < n; ++r) {
        vals[r] = std::max(1.0 - m * psis[r], 0.0);
      }
      row.f_est.push_back(mc_estimate(vals));
    }
    out.rows.push_back(std::move(row));
  }

  double max_pair_z = -std::numeric_limits<double>::infinity();
  for (std::size_t mi = 0; mi < out.ms.size(); ++mi) {
    for (std::size_t k = 0; k + 1 < out.rows.size(); ++k) {
      const auto& a = out.rows[k].f_est[mi];
      const auto& b = out.rows[k + 1].f_est[mi];
      const double combined =
          std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
      const double diff = b.mean - a.mean;  // must be <= 0 up to noise
      double z;
      if (combined > 0.0) {
        z = diff / combined;
      } else {
        z = (diff <= 1e-12) ? 0.0 : std::numeric_limits<double>::infinity();
      }
      max_pair_z = std::max(max_pair_z, z);
    }
  }
  if (out.rows.size() < 2) max_pair_z = 0.0;
  out.report = make_report(
      "scan", max_pair_z, 2.0, max_pair_z <= 2.0, seed,
      fmt_params({{"d", std::to_string(d)},
                  {"side", std::to_string(side)},
                  {"weights", std::to_string(weights.size())},
                  {"n", u64s(n)}}));
  return out;
}

// ---- process equivalences ------------------------------------------------------

TestReport errw_equivalence_experiment(const graphs::WeightedGraph& g,
                                       const std::vector<double>& a_edges,
                                       int x0, std::uint64_t k,
                                       std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("replicate count must be positive");
  if (k == 0) throw ConfigError("path length must be positive");
  Rng rng_a(seed, fnv1a64("errw-direct"), 0);
  Rng rng_b(seed, fnv1a64("errw-gamma"), 0);
  const auto counts_a = processes::path_distribution(
      [&](Rng& r) {
        return processes::simulate_errw(g, a_edges, x0, k, r);
      },
      k, n, rng_a);
  const auto counts_b = processes::path_distribution(
      [&](Rng& r) {
        return processes::errw_via_vrjp(g, a_edges, x0, k, r);
      },
      k, n, rng_b);
  const Chi2Result c = chi2_two_sample(counts_a, counts_b);
  return make_report("errw_equivalence", c.pvalue, kChi2Significance,
                     c.pvalue > kChi2Significance, seed,
                     fmt_params({{"n", u64s(n)},
                                 {"k", u64s(k)},
                                 {"x0", std::to_string(x0)},
                                 {"chi2", fmt_g17(c.statistic)},
                                 {"df", std::to_string(c.df)}}));
}

TestReport vrjp_conductance_equivalence(const graphs::WeightedGraph& g,
                                        int x0, std::uint64_t k,
                                        std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("replicate count must be positive");
  if (k == 0) throw ConfigError("path length must be positive");
  const linalg::SymMatrix w = graphs::weight_matrix(g);
  Rng rng_a(seed, fnv1a64("vrjp-direct"), 0);
  Rng rng_b(seed, fnv1a64("vrjp-conductance"), 0);
  const auto counts_a = processes::path_distribution(
      [&](Rng& r) { return processes::simulate_vrjp(g, x0, k, r); }, k, n,
      rng_a);
  const auto counts_b = processes::path_distribution(
      [&](Rng& r) {
        const auto bs =
            betafield::sample_beta(w, betafield::EtaVector::zero(w.dim()), r);
        const auto gm = betafield::green(betafield::h_from_beta(bs));
        const auto c = processes::conductances_from_beta(gm, g, x0);
        return processes::rw_conductances(g, c, x0, k, r);
      },
      k, n, rng_b);
  const Chi2Result c = chi2_two_sample(counts_a, counts_b);
  return make_report("vrjp_conductance", c.pvalue, kChi2Significance,
                     c.pvalue > kChi2Significance, seed,
                     fmt_params({{"n", u64s(n)},
                                 {"k", u64s(k)},
                                 {"x0", std::to_string(x0)},
                                 {"chi2", fmt_g17(c.statistic)},
                                 {"df", std::to_string(c.df)}}));
}

// ---- effective weight ---------------------------------------------------------

EffWeightResult eff_weight_experiment(const graphs::WeightedGraph& g, int x0,
                                      int delta, std::uint64_t n,
                                      std::uint64_t seed, int threads) {
  if (n == 0) throw ConfigError("replicate count must be positive");
  const linalg::SymMatrix w = graphs::weight_matrix(g);
  EffWeightResult out;
  out.c_eff = electrical::effective_conductance(g, x0, delta);
  const std::vector<double> vals = replicate_map<double>(
      seed, "eff-weight", n, threads, [&](std::uint64_t, Rng& rng) {
        const auto bs =
            betafield::sample_beta(w, betafield::EtaVector::zero(w.dim()), rng);
        const auto gm = betafield::green(betafield::h_from_beta(bs));
        return electrical::effective_weight(gm, x0, delta);
      });
  out.w_eff = mc_estimate(vals);
  double z;
  if (out.w_eff.std_error > 0.0) {
    z = (out.w_eff.mean - out.c_eff) / out.w_eff.std_error;
  } else {
    // Degenerate sampler (two-vertex equality case): compare exactly.
    z = (std::abs(out.w_eff.mean - out.c_eff) <= 1e-12)
            ? 0.0
            : std::numeric_limits<double>::infinity();
  }
  out.report = make_report(
      "eff_weight", z, 2.0, z <= 2.0, seed,
      fmt_params({{"n", u64s(n)},
                  {"x0", std::to_string(x0)},
                  {"delta", std::to_string(delta)},
                  {"c_eff", fmt_g17(out.c_eff)},
                  {"mean", fmt_g17(out.w_eff.mean)},
                  {"stderr", fmt_g17(out.w_eff.std_error)}}));
  return out;
}

// ---- conditional martingale ----------------------------------------------------

MartingaleResult martingale_experiment(
    const linalg::SymMatrix& w_inner, const std::vector<double>& w1,
    const std::vector<double>& w2, double w_minus, double w_plus,
    const std::vector<double>& x1, const std::vector<double>& x2, int outer,
    std::uint64_t inner, MartingaleMode mode, std::uint64_t seed,
    int threads) {
  if (outer < 1) throw ConfigError("outer replicate count must be positive");
  if (inner == 0) throw ConfigError("inner replicate count must be positive");
  const bool given_inf = (mode == MartingaleMode::kGivenHInf);
  const std::string tag =
      given_inf ? "martingale-a/outer" : "martingale-b/outer";
  const std::string inner_tag =
      given_inf ? "martingale-a/inner" : "martingale-b/inner";
  const std::uint64_t inner_tag_h = fnv1a64(inner_tag);

  const std::vector<int> hits = replicate_map<int>(
      seed, tag, static_cast<std::uint64_t>(outer), threads,
      [&](std::uint64_t i, Rng& rng) {
        const auto h = coupling::sample_inner(w_inner, w1, w2, rng);
        const auto rp = coupling::reduce_quadratic(h, negated(w1),
                                                   negated(w2), x1, x2);
        const auto t = coupling::couple_triple(h, w1, w2, w_minus, w_plus, x1,
                                               rng);
        const double a1 = rp.f1.alpha1, a2 = rp.f1.alpha2;
        const double b1 = rp.f2.alpha1, b2 = rp.f2.alpha2;

        double target;
        if (given_inf) {
          target = rp.c_cross + (a1 + a2) * (b1 + b2) / t.gamma;
        } else {
          target = rp.c_cross +
                   coupling::pair_block_form(
                       2.0 * t.beta_tilde_plus[0], 2.0 * t.beta_tilde_plus[1],
                       t.k_form + w_plus, a1, a2, b1, b2);
        }

        Rng rin(seed, inner_tag_h, i);
        std::vector<double> vals(inner);
        for (std::uint64_t j = 0; j < inner; ++j) {
          if (given_inf) {
            const double u = coupling::sample_tilted(
                coupling::TiltedParams{t.w_tilde_plus, t.delta}, rin);
            const auto pb =
                coupling::pair_betas(t.gamma, t.lambda, t.w_tilde_plus, u);
            vals[j] = rp.c_cross +
                      coupling::pair_block_form(pb[0], pb[1],
                                                t.k_form + w_plus, a1, a2, b1,
                                                b2);
          } else {
            const double um =
                coupling::resample_minus_given_plus(t.u_couple, rin);
            const auto pb =
                coupling::pair_betas(t.gamma, t.lambda, t.w_tilde_minus, um);
            vals[j] = rp.c_cross +
                      coupling::pair_block_form(pb[0], pb[1],
                                                t.k_form + w_minus, a1, a2,
                                                b1, b2);
          }
        }
        const McEstimate est = mc_estimate(vals);
        bool hit;
        if (est.std_error > 1e-12) {
          hit = std::abs(est.mean - target) <= 4.0 * est.std_error;
        } else {
          hit = std::abs(est.mean - target) <=
                1e-9 * std::max(1.0, std::abs(target));
        }
        return hit ? 1 : 0;
      });

  MartingaleResult out;
  out.outer = outer;
  for (int h : hits) out.hits += h;
  const double frac = static_cast<double>(out.hits) / outer;
  out.report = make_report(
      given_inf ? "martingale_a" : "martingale_b", frac, 0.95, frac >= 0.95,
      seed,
      fmt_params({{"outer", std::to_string(outer)},
                  {"inner", u64s(inner)},
                  {"hits", std::to_string(out.hits)}}));
  return out;
}

// ---- standard coupling fixture ----------------------------------------------

TripleConfig standard_triple_config() {
  TripleConfig cfg{linalg::SymMatrix(3), {0.5, 0.0, 0.9}, {0.0, 1.1, 0.3},
                   0.4,                  1.5,             {1.0, 0.2, 0.0, 2.0, 0.7}};
  cfg.w_inner.set(0, 1, 1.0);
  cfg.w_inner.set(1, 2, 0.8);
  return cfg;
}

linalg::SymMatrix full_weight_matrix(const TripleConfig& cfg, double w_pair) {
  const int n = cfg.w_inner.dim();
  linalg::SymMatrix w(n + 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) w.set(i, j, cfg.w_inner(i, j));
    w.set(i, n, cfg.w1[i]);
    w.set(i, n + 1, cfg.w2[i]);
  }
  w.set(n, n + 1, w_pair);
  return w;
}

// ---- suite -------------------------------------------------------------------

namespace {

std::uint64_t param_n(const json& params, std::uint64_t def) {
  if (!params.contains("n")) return def;
  const long long v = params.at("n").get<long long>();
  if (v <= 0) throw ConfigError("replicate count must be positive");
  return static_cast<std::uint64_t>(v);
}

// 3-vertex path with eta = (0.2, 0, 0.7): small enough for exact
// per-coordinate reference laws, large enough to exercise elimination.
struct Path3 {
  linalg::SymMatrix w{3};
  betafield::EtaVector eta{std::vector<double>{0.2, 0.0, 0.7}};
  Path3() {
    w.set(0, 1, 1.0);
    w.set(1, 2, 1.5);
  }
  double eta_hat(int v) const {
    double s = eta[v];
    for (int k = 0; k < 3; ++k) s += w(v, k);
    return s;
  }
};

graphs::WeightedGraph suite_triangle() {
  return graphs::build_graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

std::vector<TestReport> run_beta_marginal_gig(const json& params,
                                              std::uint64_t seed,
                                              int threads) {
  const std::uint64_t n = param_n(params, 20000);
  const Path3 cfg;
  const auto samples = replicate_map<std::array<double, 3>>(
      seed, "beta-marginal", n, threads, [&](std::uint64_t, Rng& rng) {
        const auto bs = betafield::sample_beta(cfg.w, cfg.eta, rng);
        return std::array<double, 3>{2.0 * bs.beta[0], 2.0 * bs.beta[1],
                                     2.0 * bs.beta[2]};
      });
  std::vector<TestReport> reports;
  std::vector<double> coord(n);
  for (int v = 0; v < 3; ++v) {
    for (std::uint64_t r = 0; r < n; ++r) coord[r] = samples[r][v];
    const double inv = cfg.eta_hat(v) * cfg.eta_hat(v);
    reports.push_back(ks_test(
        "beta_marginal_gig/v" + std::to_string(v), coord,
        [inv](double x) { return betafield::gig_half_cdf(x, 1.0, inv); },
        kKsSignificance, seed, fmt_params({{"n", u64s(n)}})));
  }
  return reports;
}

std::vector<TestReport> run_elimination_order(const json& params,
                                              std::uint64_t seed,
                                              int threads) {
  const std::uint64_t n = param_n(params, 10000);
  const Path3 cfg;
  const std::vector<int> order_a{0, 1, 2};
  const std::vector<int> order_b{2, 0, 1};
  const auto draw = [&](const std::vector<int>& order, const char* tag) {
    return replicate_map<std::array<double, 3>>(
        seed, tag, n, threads, [&](std::uint64_t, Rng& rng) {
          const auto bs = betafield::sample_beta(cfg.w, cfg.eta, rng, &order);
          return std::array<double, 3>{bs.beta[0], bs.beta[1], bs.beta[2]};
        });
  };
  const auto sa = draw(order_a, "elim/asc");
  const auto sb = draw(order_b, "elim/perm");
  std::vector<TestReport> reports;
  std::vector<double> ca(n), cb(n);
  for (int v = 0; v < 3; ++v) {
    for (std::uint64_t r = 0; r < n; ++r) {
      ca[r] = sa[r][v];
      cb[r] = sb[r][v];
    }
    reports.push_back(ks_test_two("elimination_order/v" + std::to_string(v),
                                  ca, cb, kKsSignificance, seed,
                                  fmt_params({{"n", u64s(n)}})));
  }
  return reports;
}

std::vector<TestReport> run_gamma_z(const json& params, std::uint64_t seed,
                                    int threads) {
  const std::uint64_t n = param_n(params, 20000);
  const double w = 1.3;
  const double lambda = 0.4;
  linalg::SymMatrix wm(2);
  wm.set(0, 1, w);
  const auto samples = replicate_map<std::array<double, 2>>(
      seed, "gamma-z", n, threads, [&](std::uint64_t, Rng& rng) {
        const auto bs =
            betafield::sample_beta(wm, betafield::EtaVector::zero(2), rng);
        const auto gz =
            coupling::beta_to_gammaz(bs.beta[0], bs.beta[1], w, lambda);
        // Conditionally on gamma, u = sqrt(Z) - 1/sqrt(Z) follows the tilted
        // law with scale w + lambda(1-lambda)gamma and tilt 1 - 2*lambda;
        // its probability integral transform must be uniform.
        const double u = std::sqrt(gz.z) - 1.0 / std::sqrt(gz.z);
        const double k_cond = w + lambda * (1.0 - lambda) * gz.gamma;
        const double pit = coupling::tilted_cdf(
            coupling::TiltedParams{k_cond, 1.0 - 2.0 * lambda}, u);
        return std::array<double, 2>{gz.gamma, pit};
      });
  std::vector<double> gammas(n), pits(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    gammas[r] = samples[r][0];
    pits[r] = samples[r][1];
  }
  std::vector<TestReport> reports;
  reports.push_back(ks_test(
      "gamma_z/gamma", gammas,
      [](double x) { return gamma_cdf(x, 0.5, 0.5); }, kKsSignificance, seed,
      fmt_params({{"n", u64s(n)}, {"w", fmt_g17(w)}})));
  reports.push_back(ks_test("gamma_z/u_pit", pits, uniform_cdf01,
                            kKsSignificance, seed,
                            fmt_params({{"n", u64s(n)},
                                        {"lambda", fmt_g17(lambda)}})));
  return reports;
}

std::vector<TestReport> run_tilted_marginals(const json& params,
                                             std::uint64_t seed,
                                             int threads) {
  const std::uint64_t n = param_n(params, 20000);
  const std::vector<coupling::TiltedParams> cases{
      {1.0, 0.0}, {1.0, 1.0}, {0.3, -0.5}};
  std::vector<TestReport> reports;
  int idx = 0;
  for (const auto& p : cases) {
    const auto vals = replicate_map<double>(
        seed, "tilted/" + std::to_string(idx), n, threads,
        [&](std::uint64_t, Rng& rng) {
          return coupling::sample_tilted(p, rng);
        });
    reports.push_back(ks_test(
        "tilted_marginals/case" + std::to_string(idx), vals,
        [p](double u) { return coupling::tilted_cdf(p, u); }, kKsSignificance,
        seed,
        fmt_params({{"n", u64s(n)},
                    {"k", fmt_g17(p.k)},
                    {"delta", fmt_g17(p.delta)}})));
    ++idx;
  }
  return reports;
}

std::vector<TestReport> run_tilted_abs(const json& params, std::uint64_t seed,
                                       int threads) {
  const std::uint64_t n = param_n(params, 20000);
  const auto draw_abs = [&](double delta, const char* tag) {
    return replicate_map<double>(
        seed, tag, n, threads, [&](std::uint64_t, Rng& rng) {
          return std::abs(coupling::sample_tilted(
              coupling::TiltedParams{1.0, delta}, rng));
        });
  };
  const auto a = draw_abs(1.0, "tilted-abs/tilted");
  const auto b = draw_abs(0.0, "tilted-abs/flat");
  return {ks_test_two("tilted_abs", a, b, kKsSignificance, seed,
                      fmt_params({{"n", u64s(n)}}))};
}

std::vector<TestReport> run_tilted_ratio(const json& params,
                                         std::uint64_t seed, int /*threads*/) {
  const std::uint64_t n = param_n(params, 100000);
  struct Case {
    double delta, delta_prime, k;
  };
  const std::vector<Case> cases{{0.0, 1.0, 1.0}, {1.0, -1.0, 0.3},
                                {0.5, -0.5, 1.0}};
  std::vector<TestReport> reports;
  int idx = 0;
  for (const auto& c : cases) {
    Rng rng(seed, fnv1a64("tilted-ratio/" + std::to_string(idx)), 0);
    const McEstimate est = coupling::tilted_ratio_mean(
        coupling::TiltedParams{c.k, c.delta}, c.delta_prime, n, rng);
    const double z = std::abs(est.mean - 1.0) /
                     (est.std_error > 0.0 ? est.std_error : 1e-300);
    reports.push_back(make_report(
        "tilted_ratio/case" + std::to_string(idx), z, 3.0, z <= 3.0, seed,
        fmt_params({{"n", u64s(n)},
                    {"delta", fmt_g17(c.delta)},
                    {"delta_prime", fmt_g17(c.delta_prime)},
                    {"k", fmt_g17(c.k)},
                    {"mean", fmt_g17(est.mean)}})));
    ++idx;
  }
  return reports;
}

std::vector<TestReport> run_couple_marginal(const json& params,
                                            std::uint64_t seed, int threads) {
  const std::uint64_t n = param_n(params, 20000);
  const double k_minus = 0.7, k_plus = 2.0, delta = 0.3;
  double max_energy_rel = 0.0;
  std::mutex mu;
  const auto vals = replicate_map<double>(
      seed, "couple-marginal", n, threads, [&](std::uint64_t, Rng& rng) {
        const auto c = coupling::couple_tilted(k_minus, k_plus, delta, rng);
        const double e_minus = k_minus * c.u_minus * c.u_minus;
        const double e_plus = k_plus * c.u_plus * c.u_plus;
        const double rel =
            std::abs(e_minus - e_plus) / std::max(1.0, std::abs(e_plus));
        {
          const std::lock_guard<std::mutex> lk(mu);
          max_energy_rel = std::max(max_energy_rel, rel);
        }
        return c.u_minus;
      });
  std::vector<TestReport> reports;
  reports.push_back(ks_test(
      "couple_marginal/u_minus", vals,
      [&](double u) {
        return coupling::tilted_cdf(coupling::TiltedParams{k_minus, delta}, u);
      },
      kKsSignificance, seed,
      fmt_params({{"n", u64s(n)},
                  {"k_minus", fmt_g17(k_minus)},
                  {"k_plus", fmt_g17(k_plus)},
                  {"delta", fmt_g17(delta)}})));
  reports.push_back(make_report("couple_marginal/energy", max_energy_rel,
                                1e-9, max_energy_rel <= 1e-9, seed,
                                fmt_params({{"n", u64s(n)}})));
  return reports;
}

// Shared by the faithful marginal check and the negative controls: samples
// n coupled triples and returns the diagonals (2*beta) of both assembled
// matrices plus the merged coordinate of the reference matrix.
struct TripleDiagSamples {
  std::vector<std::array<double, 5>> minus_diag;
  std::vector<std::array<double, 5>> plus_diag;
  std::vector<double> inf_merged;
};

TripleDiagSamples sample_triple_diags(const TripleConfig& cfg,
                                      coupling::TripleVariant variant,
                                      std::uint64_t n, std::uint64_t seed,
                                      int threads, const std::string& tag) {
  const auto rows = replicate_map<std::array<double, 11>>(
      seed, tag, n, threads, [&](std::uint64_t, Rng& rng) {
        const auto h = coupling::sample_inner(cfg.w_inner, cfg.w1, cfg.w2, rng);
        const auto t = coupling::couple_triple(h, cfg.w1, cfg.w2, cfg.w_minus,
                                               cfg.w_plus, cfg.x1, rng,
                                               variant);
        std::array<double, 11> out{};
        for (int i = 0; i < 5; ++i) out[i] = t.h_minus.m(i, i);
        for (int i = 0; i < 5; ++i) out[5 + i] = t.h_plus.m(i, i);
        out[10] = t.h_inf.m(3, 3);
        return out;
      });
  TripleDiagSamples s;
  s.minus_diag.resize(n);
  s.plus_diag.resize(n);
  s.inf_merged.resize(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    for (int i = 0; i < 5; ++i) {
      s.minus_diag[r][i] = rows[r][i];
      s.plus_diag[r][i] = rows[r][5 + i];
    }
    s.inf_merged[r] = rows[r][10];
  }
  return s;
}

double full_row_sum(const linalg::SymMatrix& w, int v) {
  double s = 0.0;
  for (int k = 0; k < w.dim(); ++k) s += w(v, k);
  return s;
}

std::vector<TestReport> run_coupled_beta_marginals(const json& params,
                                                   std::uint64_t seed,
                                                   int threads) {
  const std::uint64_t n = param_n(params, 20000);
  const TripleConfig cfg = standard_triple_config();
  const auto s = sample_triple_diags(cfg, coupling::TripleVariant::kFaithful,
                                     n, seed, threads, "triple/faithful");

  const auto draw_direct = [&](double w_pair, const char* tag) {
    const linalg::SymMatrix w = full_weight_matrix(cfg, w_pair);
    return replicate_map<std::array<double, 5>>(
        seed, tag, n, threads, [&](std::uint64_t, Rng& rng) {
          const auto bs =
              betafield::sample_beta(w, betafield::EtaVector::zero(5), rng);
          std::array<double, 5> out{};
          for (int i = 0; i < 5; ++i) out[i] = 2.0 * bs.beta[i];
          return out;
        });
  };
  const auto direct_minus = draw_direct(cfg.w_minus, "triple/direct-minus");
  const auto direct_plus = draw_direct(cfg.w_plus, "triple/direct-plus");

  std::vector<TestReport> reports;
  std::vector<double> a(n), b(n);
  const auto compare_side =
      [&](const std::vector<std::array<double, 5>>& coupled,
          const std::vector<std::array<double, 5>>& direct,
          const std::string& side) {
        for (int v = 0; v < 5; ++v) {
          for (std::uint64_t r = 0; r < n; ++r) {
            a[r] = coupled[r][v];
            b[r] = direct[r][v];
          }
          reports.push_back(ks_test_two(
              "coupled_beta_marginals/" + side + "/v" + std::to_string(v), a,
              b, kKsSignificance, seed, fmt_params({{"n", u64s(n)}})));
        }
      };
  compare_side(s.minus_diag, direct_minus, "minus");
  compare_side(s.plus_diag, direct_plus, "plus");

  // Exact reference laws for the pair coordinates and the merged vertex.
  const auto gig_report = [&](const std::string& name,
                              const std::vector<double>& vals,
                              double row_sum) {
    const double inv = row_sum * row_sum;
    reports.push_back(ks_test(
        name, vals,
        [inv](double x) { return betafield::gig_half_cdf(x, 1.0, inv); },
        kKsSignificance, seed,
        fmt_params({{"n", u64s(n)}, {"row_sum", fmt_g17(row_sum)}})));
  };
  const linalg::SymMatrix wm_full = full_weight_matrix(cfg, cfg.w_minus);
  const linalg::SymMatrix wp_full = full_weight_matrix(cfg, cfg.w_plus);
  for (int v = 3; v < 5; ++v) {
    for (std::uint64_t r = 0; r < n; ++r) {
      a[r] = s.minus_diag[r][v];
      b[r] = s.plus_diag[r][v];
    }
    gig_report("coupled_beta_marginals/gig/minus/v" + std::to_string(v), a,
               full_row_sum(wm_full, v));
    gig_report("coupled_beta_marginals/gig/plus/v" + std::to_string(v), b,
               full_row_sum(wp_full, v));
  }
  double merged_row = 0.0;
  for (double x : cfg.w1) merged_row += x;
  for (double x : cfg.w2) merged_row += x;
  gig_report("coupled_beta_marginals/gig/merged", s.inf_merged, merged_row);
  return reports;
}

std::vector<TestReport> run_one_over_beta(const json& params,
                                          std::uint64_t seed, int threads) {
  const std::uint64_t n = param_n(params, 100000);
  std::vector<TestReport> reports;
  for (const double eta : {0.5, 1.0, 2.0}) {
    const auto vals = replicate_map<double>(
        seed, "one-over-beta/" + fmt_g17(eta), n, threads,
        [&](std::uint64_t, Rng& rng) {
          const double two_beta =
              betafield::sample_gig_half(1.0, eta * eta, rng);
          return 1.0 / two_beta;
        });
    const McEstimate est = mc_estimate(vals);
    const double target = 1.0 / eta;
    const double z = std::abs(est.mean - target) / est.std_error;
    reports.push_back(
        make_report("one_over_beta/eta" + fmt_g17(eta), z, 3.0, z <= 3.0,
                    seed,
                    fmt_params({{"n", u64s(n)},
                                {"mean", fmt_g17(est.mean)},
                                {"target", fmt_g17(target)}})));
  }
  return reports;
}

std::vector<TestReport> run_psi_z_law(const json& params, std::uint64_t seed,
                                      int threads) {
  const std::uint64_t n = param_n(params, 20000);
  std::vector<TestReport> reports;

  // Two-vertex graph: psi against the closed-form law.
  {
    const double w = 1.4;
    linalg::SymMatrix wm(2);
    wm.set(0, 1, w);
    const auto vals = replicate_map<double>(
        seed, "psi/two-vertex", n, threads, [&](std::uint64_t, Rng& rng) {
          const auto bs =
              betafield::sample_beta(wm, betafield::EtaVector::zero(2), rng);
          const auto gm = betafield::green(betafield::h_from_beta(bs));
          return electrical::psi_ratio(gm, 0, 1);
        });
    reports.push_back(ks_test(
        "psi_z_law/two_vertex", vals,
        [w](double z) { return electrical::z_law_cdf(w, z); },
        kKsSignificance, seed,
        fmt_params({{"n", u64s(n)}, {"w", fmt_g17(w)}})));
  }

  // Triangle: conditionally on the remaining vertex the law is the same
  // with the Schur-reduced weight, so the PIT must be uniform.
  {
    const double w01 = 1.0, w02 = 0.7, w12 = 1.3;
    linalg::SymMatrix wm(3);
    wm.set(0, 1, w01);
    wm.set(0, 2, w02);
    wm.set(1, 2, w12);
    const auto pits = replicate_map<double>(
        seed, "psi/triangle-pit", n, threads, [&](std::uint64_t, Rng& rng) {
          const auto bs =
              betafield::sample_beta(wm, betafield::EtaVector::zero(3), rng);
          const auto gm = betafield::green(betafield::h_from_beta(bs));
          const double psi = electrical::psi_ratio(gm, 0, 1);
          const double w_cond = w01 + w02 * w12 / (2.0 * bs.beta[2]);
          return electrical::z_law_cdf(w_cond, psi);
        });
    reports.push_back(ks_test("psi_z_law/triangle_pit", pits, uniform_cdf01,
                              kKsSignificance, seed,
                              fmt_params({{"n", u64s(n)}})));
  }
  return reports;
}

std::vector<TestReport> run_errw_equivalence(const json& params,
                                             std::uint64_t seed,
                                             int /*threads*/) {
  const std::uint64_t n = param_n(params, 20000);
  const std::uint64_t k = params.contains("k")
                              ? params.at("k").get<std::uint64_t>()
                              : 4;
  const auto g = suite_triangle();
  const std::vector<double> a(g.edges().size(), 1.0);
  return {errw_equivalence_experiment(g, a, 0, k, n, seed)};
}

std::vector<TestReport> run_vrjp_conductance(const json& params,
                                             std::uint64_t seed,
                                             int /*threads*/) {
  const std::uint64_t n = param_n(params, 20000);
  const std::uint64_t k = params.contains("k")
                              ? params.at("k").get<std::uint64_t>()
                              : 4;
  return {vrjp_conductance_equivalence(suite_triangle(), 0, k, n, seed)};
}

std::vector<TestReport> run_eff_weight(const json& params, std::uint64_t seed,
                                       int threads) {
  const std::uint64_t n = param_n(params, 20000);
  return {eff_weight_experiment(suite_triangle(), 0, 1, n, seed, threads)
              .report};
}

std::vector<TestReport> run_convex_order(const json& params,
                                         std::uint64_t seed, int threads) {
  const std::uint64_t n = param_n(params, 4000);
  const auto g = graphs::build_graph(
      4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
  const std::vector<double> wm(g.edges().size(), 0.5);
  const std::vector<double> wp(g.edges().size(), 2.0);
  const std::vector<double> x(4, 1.0);
  return {convex_order_experiment(g, wm, wp, 0, x, default_convex_family(), n,
                                  seed, threads)
              .report};
}

std::vector<TestReport> run_scan(const json& params, std::uint64_t seed,
                                 int threads) {
  const std::uint64_t n = param_n(params, 3000);
  return {monotonicity_scan(2, 5, {0.5, 1.0, 2.0}, -1, n, seed, threads)
              .report};
}

// Equality-case calibration: with identical weights on both sides every
// comparison (convex rows included) must agree two-sided within 3 stderr.
std::vector<TestReport> run_convex_order_equal(const json& params,
                                               std::uint64_t seed,
                                               int threads) {
  const std::uint64_t n = param_n(params, 4000);
  const auto g = graphs::build_graph(
      4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
  const std::vector<double> w(g.edges().size(), 1.0);
  const std::vector<double> x(4, 1.0);
  const auto res = convex_order_experiment(g, w, w, 0, x,
                                           default_convex_family(), n, seed,
                                           threads);
  double max_absz = 0.0;
  for (const auto& row : res.rows) {
    max_absz = std::max(max_absz, std::abs(row.z));
  }
  return {make_report("convex_order_equal", max_absz, 3.0, max_absz <= 3.0,
                      seed, fmt_params({{"n", u64s(n)}}))};
}

// Equality-case calibration for the effective weight: on a two-vertex graph
// the sampled value is the deterministic conductance itself.
std::vector<TestReport> run_eff_weight_equal(const json& params,
                                             std::uint64_t seed,
                                             int threads) {
  const std::uint64_t n = param_n(params, 2000);
  const auto g = graphs::build_graph(2, {{0, 1, 1.7}});
  const auto res = eff_weight_experiment(g, 0, 1, n, seed, threads);
  const double err = std::abs(res.w_eff.mean - res.c_eff);
  const double tol = std::max(3.0 * res.w_eff.std_error, 1e-12);
  return {make_report("eff_weight_equal", err, tol, err <= tol, seed,
                      fmt_params({{"n", u64s(n)},
                                  {"c_eff", fmt_g17(res.c_eff)}}))};
}

std::vector<TestReport> run_martingale(const json& params, std::uint64_t seed,
                                       int threads, MartingaleMode mode) {
  const int outer = params.contains("outer")
                        ? params.at("outer").get<int>()
                        : 40;
  const std::uint64_t inner = params.contains("inner")
                                  ? params.at("inner").get<std::uint64_t>()
                                  : 2000;
  const TripleConfig cfg = standard_triple_config();
  const std::vector<double> x2{0.3, 1.0, 0.5, 0.0, 1.2};
  return {martingale_experiment(cfg.w_inner, cfg.w1, cfg.w2, cfg.w_minus,
                                cfg.w_plus, cfg.x1, x2, outer, inner, mode,
                                seed, threads)
              .report};
}

std::vector<TestReport> run_martingale_a(const json& params,
                                         std::uint64_t seed, int threads) {
  return run_martingale(params, seed, threads, MartingaleMode::kGivenHInf);
}

std::vector<TestReport> run_martingale_b(const json& params,
                                         std::uint64_t seed, int threads) {
  return run_martingale(params, seed, threads, MartingaleMode::kGivenHPlus);
}

// Negative controls: deliberately corrupted constructions whose first pair
// coordinate must FAIL the exact reference law. They pass when the KS
// p-value is below significance.
std::vector<TestReport> run_negative_control(const json& params,
                                             std::uint64_t seed, int threads,
                                             coupling::TripleVariant variant,
                                             const std::string& name) {
  const std::uint64_t n = param_n(params, 20000);
  const TripleConfig cfg = standard_triple_config();
  const auto s =
      sample_triple_diags(cfg, variant, n, seed, threads, "triple/" + name);
  const linalg::SymMatrix wm_full = full_weight_matrix(cfg, cfg.w_minus);
  const linalg::SymMatrix wp_full = full_weight_matrix(cfg, cfg.w_plus);

  const auto pvalue_at = [&](const std::vector<std::array<double, 5>>& diag,
                             const linalg::SymMatrix& w_full) {
    std::vector<double> vals(n);
    for (std::uint64_t r = 0; r < n; ++r) vals[r] = diag[r][3];
    const double row = full_row_sum(w_full, 3);
    const double inv = row * row;
    const double d = ks_statistic(vals, [inv](double x) {
      return betafield::gig_half_cdf(x, 1.0, inv);
    });
    return ks_pvalue(d, static_cast<double>(n));
  };

  double stat;
  if (variant == coupling::TripleVariant::kSameZ) {
    // Both assembled matrices carry the corrupted coordinate.
    stat = std::max(pvalue_at(s.minus_diag, wm_full),
                    pvalue_at(s.plus_diag, wp_full));
  } else {
    stat = pvalue_at(s.plus_diag, wp_full);
  }
  const bool pass = stat < kKsSignificance;
  return {make_report(name, stat, kKsSignificance, pass, seed,
                      fmt_params({{"n", u64s(n)},
                                  {"expected_failure", "true"}}))};
}

std::vector<TestReport> run_negative_same_z(const json& params,
                                            std::uint64_t seed, int threads) {
  return run_negative_control(params, seed, threads,
                              coupling::TripleVariant::kSameZ,
                              "negative_control_same_z");
}

std::vector<TestReport> run_negative_minus_beta(const json& params,
                                                std::uint64_t seed,
                                                int threads) {
  return run_negative_control(params, seed, threads,
                              coupling::TripleVariant::kMinusBetaInPlus,
                              "negative_control_minus_beta");
}

std::vector<TestReport> run_identities(const json& params, std::uint64_t seed,
                                       int threads) {
  const std::uint64_t n = param_n(params, 2000);
  const TripleConfig cfg = standard_triple_config();
  const std::vector<double> x2{0.3, 1.0, 0.5, 0.0, 1.2};

  struct Errs {
    double three_way = 0.0;
    double assembly = 0.0;  // matrix path, normalized by its own tolerance
    double reduced = 0.0;   // cross form, normalized likewise
    double energy = 0.0;
    double diag = 0.0;
    double det = 0.0;  // normalized by the cancellation tolerance
    double roundtrip = 0.0;
    double block_inv = 0.0;
    double kappa = 1.0;
    double gamma = 1.0;
  };
  const auto errs = replicate_map<Errs>(
      seed, "identities", n, threads, [&](std::uint64_t, Rng& rng) {
        Errs e;
        const auto h = coupling::sample_inner(cfg.w_inner, cfg.w1, cfg.w2, rng);
        const auto t = coupling::couple_triple(h, cfg.w1, cfg.w2, cfg.w_minus,
                                               cfg.w_plus, cfg.x1, rng);

        // Per-draw audit: the stable evaluation must hit the strict
        // tolerance; the matrix and determinant paths are judged against
        // the conditioning of this draw (strict again when well-behaved).
        const auto audit = coupling::audit_triple(t);
        e.three_way = audit.three_way_stable;
        e.assembly = std::max(audit.matrix_vs_stable, audit.three_way_matrix) /
                     audit.cond_tol;
        e.energy = audit.energy_err;
        e.diag = audit.diag_err;
        e.det = audit.det_err / audit.det_tol;
        e.kappa = audit.kappa_hat;
        e.gamma = audit.gamma;

        // Cross form against a second vector: the O(1) reduced evaluation
        // (with the factored determinant) meets the dense solve within the
        // same conditioning-aware tolerance.
        const auto rp = coupling::reduce_quadratic(h, negated(cfg.w1),
                                                   negated(cfg.w2), cfg.x1,
                                                   x2);
        const double w_pair = t.k_form + cfg.w_plus;
        const double num_cross =
            rp.f1.alpha1 * (2.0 * t.beta_tilde_plus[1] * rp.f2.alpha1 +
                            w_pair * rp.f2.alpha2) +
            rp.f1.alpha2 * (w_pair * rp.f2.alpha1 +
                            2.0 * t.beta_tilde_plus[0] * rp.f2.alpha2);
        const double reduced_plus = rp.c_cross + num_cross / audit.det_plus;
        const double q_cross =
            linalg::quad_form_pd_ext(t.h_plus.m, cfg.x1, x2);
        e.reduced = std::abs(reduced_plus - q_cross) /
                    std::max({1.0, std::abs(q_cross),
                              std::abs(reduced_plus)}) /
                    audit.cond_tol;

        // Change of variables roundtrip on fresh values.
        {
          coupling::GammaZ gz;
          gz.gamma = sample_gamma(0.5, 0.5, rng);
          gz.z = std::exp(0.5 * rng.gaussian());
          gz.lambda = rng.uniform();
          gz.w = 0.1 + rng.uniform();
          const auto betas = coupling::gammaz_to_beta(gz);
          const auto back = coupling::beta_to_gammaz(betas.first,
                                                     betas.second, gz.w,
                                                     gz.lambda);
          e.roundtrip = std::max(
              {std::abs(back.gamma - gz.gamma) / std::max(1.0, gz.gamma),
               std::abs(back.z - gz.z) / std::max(1.0, gz.z)});
        }

        // Block inversion agrees with the dense inverse on the plus
        // matrix, relative to the scale of the inverse (whose entries grow
        // like 1/gamma) and to this draw's conditioning.
        {
          const auto bi = linalg::block_inverse(t.h_plus.m, 3);
          const auto di = linalg::invert_pd(t.h_plus.m);
          double diff = 0.0;
          double scale = 1.0;
          for (int i = 0; i < 5; ++i) {
            for (int j = 0; j <= i; ++j) {
              diff = std::max(diff, std::abs(bi(i, j) - di(i, j)));
              scale = std::max(scale, std::abs(di(i, j)));
            }
          }
          const double btol = std::max(
              1e-8, 64.0 * std::numeric_limits<double>::epsilon() * e.kappa);
          e.block_inv = diff / scale / btol;
        }
        return e;
      });

  Errs worst;
  worst.kappa = 0.0;
  double gamma_min = std::numeric_limits<double>::infinity();
  for (const auto& e : errs) {
    worst.three_way = std::max(worst.three_way, e.three_way);
    worst.assembly = std::max(worst.assembly, e.assembly);
    worst.reduced = std::max(worst.reduced, e.reduced);
    worst.energy = std::max(worst.energy, e.energy);
    worst.diag = std::max(worst.diag, e.diag);
    worst.det = std::max(worst.det, e.det);
    worst.roundtrip = std::max(worst.roundtrip, e.roundtrip);
    worst.block_inv = std::max(worst.block_inv, e.block_inv);
    worst.kappa = std::max(worst.kappa, e.kappa);
    gamma_min = std::min(gamma_min, e.gamma);
  }
  const std::string np = fmt_params({{"n", u64s(n)}});
  const std::string np_cond = fmt_params(
      {{"n", u64s(n)},
       {"kappa_max", fmt_g17(worst.kappa)},
       {"gamma_min", fmt_g17(gamma_min)}});
  std::vector<TestReport> reports;
  reports.push_back(make_report("identities/three_way", worst.three_way, 1e-9,
                                worst.three_way <= 1e-9, seed, np));
  reports.push_back(make_report("identities/assembly", worst.assembly, 1.0,
                                worst.assembly <= 1.0, seed, np_cond));
  reports.push_back(make_report("identities/reduced_form", worst.reduced,
                                1.0, worst.reduced <= 1.0, seed, np_cond));
  reports.push_back(make_report("identities/energy", worst.energy, 1e-9,
                                worst.energy <= 1e-9, seed, np));
  reports.push_back(make_report("identities/diag_match", worst.diag, 1e-9,
                                worst.diag <= 1e-9, seed, np));
  reports.push_back(make_report("identities/pair_det", worst.det, 1.0,
                                worst.det <= 1.0, seed, np_cond));
  reports.push_back(make_report("identities/gammaz_roundtrip",
                                worst.roundtrip, 1e-10,
                                worst.roundtrip <= 1e-10, seed, np));
  reports.push_back(make_report("identities/block_inverse", worst.block_inv,
                                1.0, worst.block_inv <= 1.0, seed, np_cond));
  return reports;
}

std::vector<TestReport> run_green_positivity(const json& params,
                                             std::uint64_t seed,
                                             int threads) {
  const std::uint64_t n = param_n(params, 500);
  const TripleConfig cfg = standard_triple_config();
  const auto worst = replicate_map<double>(
      seed, "green-positivity", n, threads, [&](std::uint64_t, Rng& rng) {
        const auto h = coupling::sample_inner(cfg.w_inner, cfg.w1, cfg.w2, rng);
        const auto t =
            coupling::couple_triple(h, cfg.w1, cfg.w2, cfg.w_minus,
                                    cfg.w_plus, cfg.x1, rng);
        // Worst positivity/connectivity violation across the three
        // assembled operators; zero means clean.
        double violation = 0.0;
        for (const auto* m : {&t.h_minus.m, &t.h_plus.m, &t.h_inf.m}) {
          const TestReport r = linalg::green_positivity_check(*m);
          if (!r.pass)
            violation = std::max({violation, r.statistic, r.threshold});
        }
        return violation;
      });
  double max_violation = 0.0;
  for (double v : worst) max_violation = std::max(max_violation, v);
  return {make_report("green_positivity", max_violation, 0.0,
                      max_violation <= 0.0, seed,
                      fmt_params({{"n", u64s(n)}}))};
}

struct SuiteEntry {
  const char* name;
  std::vector<TestReport> (*fn)(const json&, std::uint64_t, int);
};

const std::vector<SuiteEntry>& registry() {
  static const std::vector<SuiteEntry> entries{
      {"beta_marginal_gig", run_beta_marginal_gig},
      {"elimination_order", run_elimination_order},
      {"gamma_z", run_gamma_z},
      {"tilted_marginals", run_tilted_marginals},
      {"tilted_abs", run_tilted_abs},
      {"tilted_ratio", run_tilted_ratio},
      {"couple_marginal", run_couple_marginal},
      {"coupled_beta_marginals", run_coupled_beta_marginals},
      {"one_over_beta", run_one_over_beta},
      {"psi_z_law", run_psi_z_law},
      {"errw_equivalence", run_errw_equivalence},
      {"vrjp_conductance", run_vrjp_conductance},
      {"eff_weight", run_eff_weight},
      {"eff_weight_equal", run_eff_weight_equal},
      {"convex_order", run_convex_order},
      {"convex_order_equal", run_convex_order_equal},
      {"scan", run_scan},
      {"martingale_a", run_martingale_a},
      {"martingale_b", run_martingale_b},
      {"negative_control_same_z", run_negative_same_z},
      {"negative_control_minus_beta", run_negative_minus_beta},
      {"identities", run_identities},
      {"green_positivity", run_green_positivity},
  };
  return entries;
}

}  // namespace

SuiteResult run_suite(const std::string& config_text) {
  json cfg;
  if (config_text.empty()) {
    cfg = json::parse(default_suite_config());
  } else {
    try {
      cfg = json::parse(config_text);
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("invalid suite config JSON: ") +
                        ex.what());
    }
  }
  if (!cfg.is_object()) throw ConfigError("suite config must be an object");
  std::uint64_t seed = kDefaultSeed;
  if (cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
  int threads = 1;
  if (cfg.contains("threads")) {
    threads = cfg.at("threads").get<int>();
    if (threads < 1) throw ConfigError("threads must be positive");
  }

  std::vector<std::pair<std::string, json>> selected;
  if (cfg.contains("tests")) {
    if (!cfg.at("tests").is_array()) {
      throw ConfigError("suite config tests must be an array");
    }
    for (const auto& entry : cfg.at("tests")) {
      if (!entry.is_object() || !entry.contains("name") ||
          !entry.at("name").is_string()) {
        throw ConfigError("each suite test entry needs a string name");
      }
      selected.emplace_back(entry.at("name").get<std::string>(),
                            entry.value("params", json::object()));
    }
  } else {
    for (const auto& e : registry()) {
      selected.emplace_back(e.name, json::object());
    }
  }
  if (selected.empty()) throw ConfigError("suite config selects no tests");

  SuiteResult out;
  for (const auto& [name, params] : selected) {
    const SuiteEntry* entry = nullptr;
    for (const auto& e : registry()) {
      if (name == e.name) {
        entry = &e;
        break;
      }
    }
    if (entry == nullptr) {
      throw ConfigError("unknown suite test: " + name);
    }
    auto reports = entry->fn(params, seed, threads);
    out.reports.insert(out.reports.end(), reports.begin(), reports.end());
  }

  int failed = 0;
  for (const auto& r : out.reports) {
    if (!r.pass) ++failed;
  }
  out.aggregate = make_report(
      "suite", static_cast<double>(failed), 0.0, failed == 0, seed,
      fmt_params({{"tests", std::to_string(selected.size())},
                  {"reports", std::to_string(out.reports.size())},
                  {"failed", std::to_string(failed)}}));
  return out;
}

std::string default_suite_config() {
  json cfg;
  cfg["seed"] = kDefaultSeed;
  cfg["threads"] = 1;
  json tests = json::array();
  for (const auto& e : registry()) {
    json t;
    t["name"] = e.name;
    tests.push_back(t);
  }
  cfg["tests"] = tests;
  return cfg.dump(2);
}

std::vector<std::string> suite_test_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.emplace_back(e.name);
  return names;
}

void emit_reports(const std::vector<TestReport>& reports,
                  const std::string& format, std::ostream& out) {
  if (format == "jsonl") {
    for (const auto& r : reports) out << r.jsonl_line() << '\n';
  } else if (format == "csv") {
    out << TestReport::csv_header() << '\n';
    for (const auto& r : reports) out << r.csv_row() << '\n';
  } else {
    throw ConfigError("unknown report format: " + format +
                      " (expected csv or jsonl)");
  }
}

}  // namespace vrjplab::experiments
