#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrjplab/betafield.hpp"
#include "vrjplab/graphs.hpp"
#include "vrjplab/processes.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/stats.hpp"

using vrjplab::Rng;
namespace graphs = vrjplab::graphs;
namespace processes = vrjplab::processes;

namespace {

graphs::WeightedGraph triangle() {
  return graphs::build_graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

}  // namespace

TEST_CASE("errw_transition linear reinforcement") {
  const auto star = graphs::build_graph(3, {{0, 1, 1.0}, {0, 2, 1.0}});
  // Fresh edges: uniform choice.
  auto probs = processes::errw_transition(star, {1.0, 1.0}, {0, 0}, 0);
  REQUIRE(probs.size() == 2);
  CHECK(probs[0].first == 1);
  CHECK(probs[0].second == doctest::Approx(0.5));
  CHECK(probs[1].second == doctest::Approx(0.5));
  // First edge crossed twice: (1+2)/(1+2+1+0) = 3/4.
  probs = processes::errw_transition(star, {1.0, 1.0}, {2, 0}, 0);
  CHECK(probs[0].second == doctest::Approx(0.75));
  CHECK(probs[1].second == doctest::Approx(0.25));

  CHECK_THROWS_AS(processes::errw_transition(star, {1.0}, {0, 0}, 0),
                  vrjplab::DimensionError);
  CHECK_THROWS_AS(processes::errw_transition(star, {1.0, 1.0}, {0}, 0),
                  vrjplab::DimensionError);
  CHECK_THROWS_AS(processes::errw_transition(star, {1.0, 1.0}, {0, 0}, 5),
                  vrjplab::ConfigError);
}

TEST_CASE("errw on a single edge alternates deterministically") {
  const auto edge = graphs::build_graph(2, {{0, 1, 0.7}});
  Rng rng(808);
  const auto t = processes::simulate_errw(edge, 1, 7, rng);
  REQUIRE(t.vertices.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(t.vertices[i] == (i + 1) % 2);
}

TEST_CASE("errw two-step law on the triangle") {
  // Unit initial weights from vertex 0; exact enumeration of length-2 paths:
  // P(0-1-0) = P(0-2-0) = 1/3, P(0-1-2) = P(0-2-1) = 1/6.
  const auto g = triangle();
  const std::uint64_t n = 30000;
  Rng rng(909);
  const auto counts = processes::path_distribution(
      [&g](Rng& r) { return processes::simulate_errw(g, 0, 2, r); }, 2, n,
      rng);
  const std::map<std::string, double> probs{{"0-1-0", 1.0 / 3.0},
                                            {"0-2-0", 1.0 / 3.0},
                                            {"0-1-2", 1.0 / 6.0},
                                            {"0-2-1", 1.0 / 6.0}};
  std::uint64_t total = 0;
  for (const auto& [key, cnt] : counts) {
    CHECK(probs.count(key) == 1);
    total += cnt;
  }
  CHECK(total == n);
  const auto r = vrjplab::chi2_one_sample(counts, probs);
  CHECK(r.pvalue > 0.001);
}

TEST_CASE("errw steps counter and edge validation") {
  const auto g = triangle();
  Rng rng(11);
  const auto t = processes::simulate_errw(g, {2.0, 1.0, 0.5}, 1, 25, rng);
  CHECK(t.vertices.size() == 26);
  CHECK(t.vertices[0] == 1);
  for (std::size_t i = 0; i + 1 < t.vertices.size(); ++i)
    CHECK(g.has_edge(t.vertices[i], t.vertices[i + 1]));
  CHECK_THROWS_AS(processes::simulate_errw(g, {1.0, 1.0}, 0, 5, rng),
                  vrjplab::DimensionError);
  CHECK_THROWS_AS(processes::simulate_errw(g, {1.0, 0.0, 1.0}, 0, 5, rng),
                  vrjplab::ConfigError);
  CHECK_THROWS_AS(processes::simulate_errw(g, 9, 5, rng), vrjplab::ConfigError);
}

TEST_CASE("vrjp first holding time is exponential") {
  // While the walker sits at the start, the single neighbor's clock runs at
  // the constant rate w * (1 + 0).
  const auto edge = graphs::build_graph(2, {{0, 1, 0.8}});
  const std::uint64_t n = 20000;
  Rng rng(1010);
  std::vector<double> first(n);
  for (auto& x : first) {
    const auto t = processes::simulate_vrjp(edge, 0, 1, rng);
    REQUIRE(t.jump_times.size() == 1);
    x = t.jump_times[0];
  }
  const double d = vrjplab::ks_statistic(
      first, [](double x) { return 1.0 - std::exp(-0.8 * x); });
  CHECK(vrjplab::ks_pvalue(d, static_cast<double>(n)) > 0.001);
}

TEST_CASE("vrjp first target is uniform over symmetric neighbors") {
  const auto star = graphs::build_graph(3, {{0, 1, 1.3}, {0, 2, 1.3}});
  const int n = 20000;
  Rng rng(1111);
  int to_one = 0;
  for (int i = 0; i < n; ++i) {
    const auto t = processes::simulate_vrjp(star, 0, 1, rng);
    if (t.vertices[1] == 1) ++to_one;
  }
  const double freq = static_cast<double>(to_one) / n;
  CHECK(std::fabs(freq - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("vrjp local times account for the elapsed time") {
  const auto g = triangle();
  Rng rng(1212);
  const auto t = processes::simulate_vrjp(g, {1.0, 2.0, 0.5}, 0, 40, rng);
  REQUIRE(t.vertices.size() == 41);
  REQUIRE(t.jump_times.size() == 40);
  REQUIRE(t.local_times.size() == 3);
  double sum = 0.0;
  for (double lt : t.local_times) {
    CHECK(lt >= 0.0);
    sum += lt;
  }
  CHECK(sum == doctest::Approx(t.jump_times.back()).epsilon(1e-12));
  // Jump times increase strictly.
  for (std::size_t i = 1; i < t.jump_times.size(); ++i)
    CHECK(t.jump_times[i] > t.jump_times[i - 1]);
}

TEST_CASE("errw_via_vrjp shapes and edge cases") {
  const auto g = triangle();
  Rng rng(1313);
  const auto empty = processes::errw_via_vrjp(g, 2, 0, rng);
  CHECK(empty.vertices == std::vector<int>{2});
  const auto t = processes::errw_via_vrjp(g, {0.5, 1.0, 3.0}, 0, 9, rng);
  CHECK(t.vertices.size() == 10);
  for (std::size_t i = 0; i + 1 < t.vertices.size(); ++i)
    CHECK(g.has_edge(t.vertices[i], t.vertices[i + 1]));
}

TEST_CASE("errw_via_vrjp concentrates at large initial weight") {
  // With a -> infinity the mixing Gamma(a,1) weights concentrate around a,
  // so the first step converges to the weight-proportional choice. With
  // a = (1000, 3000) from the start vertex, P(to 2) ~ 3/4.
  const auto star = graphs::build_graph(3, {{0, 1, 1.0}, {0, 2, 1.0}});
  const int n = 20000;
  Rng rng(1414);
  int to_two = 0;
  for (int i = 0; i < n; ++i) {
    const auto t = processes::errw_via_vrjp(star, {1000.0, 3000.0}, 0, 1, rng);
    if (t.vertices[1] == 2) ++to_two;
  }
  const double freq = static_cast<double>(to_two) / n;
  CHECK(std::fabs(freq - 0.75) < 0.02);
}

TEST_CASE("conductances_from_beta closed form") {
  const auto edge = graphs::build_graph(2, {{0, 1, 1.0}});
  vrjplab::linalg::SymMatrix w(2);
  w.set(0, 1, 1.0);
  const auto h = vrjplab::betafield::h_from_beta(w, {1.0, 1.0});
  const auto g = vrjplab::betafield::green(h);
  const auto c = processes::conductances_from_beta(g, edge, 0);
  REQUIRE(c.size() == 1);
  // w * G(0,0) * G(0,1) = 1 * 2/3 * 1/3.
  CHECK(c[0] == doctest::Approx(2.0 / 9.0).epsilon(1e-13));

  const auto tri = triangle();
  CHECK_THROWS_AS(processes::conductances_from_beta(g, tri, 0),
                  vrjplab::DimensionError);
}

TEST_CASE("rw_conductances single-step frequencies") {
  const auto star = graphs::build_graph(3, {{0, 1, 1.0}, {0, 2, 1.0}});
  const int n = 20000;
  Rng rng(1515);
  int to_one = 0;
  for (int i = 0; i < n; ++i) {
    const auto t = processes::rw_conductances(star, {1.0, 3.0}, 0, 1, rng);
    if (t.vertices[1] == 1) ++to_one;
  }
  double freq = static_cast<double>(to_one) / n;
  CHECK(std::fabs(freq - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / n));

  // Triangle with conductances (1,1,2): from vertex 1 the neighbors 0 and 2
  // carry (1/3, 2/3).
  const auto tri = triangle();
  int to_zero = 0;
  for (int i = 0; i < n; ++i) {
    const auto t = processes::rw_conductances(tri, {1.0, 1.0, 2.0}, 1, 1, rng);
    if (t.vertices[1] == 0) ++to_zero;
  }
  freq = static_cast<double>(to_zero) / n;
  CHECK(std::fabs(freq - 1.0 / 3.0) < 3.0 * std::sqrt(2.0 / 9.0 / n));
}

TEST_CASE("path keys truncate and join with dashes") {
  processes::Trajectory t;
  t.vertices = {0, 1, 0};
  CHECK(processes::path_key(t, 2) == "0-1-0");
  CHECK(processes::path_key(t, 1) == "0-1");
  // Shorter trajectories keep their full sequence.
  CHECK(processes::path_key(t, 10) == "0-1-0");
  processes::Trajectory empty;
  CHECK(processes::path_key(empty, 3) == "");
}

TEST_CASE("path_distribution collects point masses") {
  const auto edge = graphs::build_graph(2, {{0, 1, 1.0}});
  Rng rng(1616);
  const auto counts = processes::path_distribution(
      [&edge](Rng& r) { return processes::simulate_errw(edge, 0, 3, r); }, 3,
      500, rng);
  REQUIRE(counts.size() == 1);  // deterministic alternation
  CHECK(counts.at("0-1-0-1") == 500);
}
