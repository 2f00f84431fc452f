#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vrjplab/betafield.hpp"
#include "vrjplab/graphs.hpp"
#include "vrjplab/rng.hpp"

namespace vrjplab::processes {

/// One simulated path. Discrete walks leave jump_times and local_times
/// empty; continuous-time runs fill both, with local_times summing exactly
/// to the last jump time.
struct Trajectory {
  std::vector<int> vertices;
  std::vector<double> jump_times;
  std::vector<double> local_times;
};

/// Linearly-reinforced discrete walk: from x, the step crosses edge e
/// incident to x with probability proportional to a_e plus the number of
/// prior traversals of e in either direction. `a_edges` is parallel to
/// g.edges(); the overload without it uses the graph's own weights as the
/// initial values.
Trajectory simulate_errw(const graphs::WeightedGraph& g,
                         const std::vector<double>& a_edges, int x0,
                         std::uint64_t steps, Rng& rng);
Trajectory simulate_errw(const graphs::WeightedGraph& g, int x0,
                         std::uint64_t steps, Rng& rng);

/// Continuous-time self-reinforcing jump process: sitting at x at time t,
/// the jump to neighbor y occurs at rate w_{xy} * (1 + l_y(t)) where l_y is
/// the accumulated holding time at y. Between jumps every such rate is
/// constant (only the current vertex accrues holding time), so each sojourn
/// is an exact exponential race. `w_edges` is parallel to g.edges(); the
/// overload without it uses the graph's weights.
Trajectory simulate_vrjp(const graphs::WeightedGraph& g,
                         const std::vector<double>& w_edges, int x0,
                         std::uint64_t n_jumps, Rng& rng);
Trajectory simulate_vrjp(const graphs::WeightedGraph& g, int x0,
                         std::uint64_t n_jumps, Rng& rng);

/// Draws independent edge weights W_e ~ Gamma(a_e, 1), runs the jump
/// process with them, and returns the discrete skeleton truncated to
/// `steps` moves.
Trajectory errw_via_vrjp(const graphs::WeightedGraph& g,
                         const std::vector<double>& a_edges, int x0,
                         std::uint64_t steps, Rng& rng);
Trajectory errw_via_vrjp(const graphs::WeightedGraph& g, int x0,
                         std::uint64_t steps, Rng& rng);

/// Edge conductances c_{xy} = w_{xy} * G(x0,x) * G(x0,y), parallel to
/// g.edges(); strictly positive on connected graphs.
std::vector<double> conductances_from_beta(const betafield::GreenMatrix& green,
                                           const graphs::WeightedGraph& g,
                                           int x0);

/// Reversible discrete walk: P(x -> y) = c_{xy} / sum_z c_{xz}, with
/// c_edges parallel to g.edges() and strictly positive.
Trajectory rw_conductances(const graphs::WeightedGraph& g,
                           const std::vector<double>& c_edges, int x0,
                           std::uint64_t steps, Rng& rng);

/// Exact single-step law of the reinforced walk given per-edge crossing
/// counts (parallel to g.edges()); returns (neighbor, probability) pairs.
/// Exposed for exact enumeration tests.
std::vector<std::pair<int, double>> errw_transition(
    const graphs::WeightedGraph& g, const std::vector<double>& a_edges,
    const std::vector<std::uint64_t>& crossings, int x);

/// Runs `sampler` n times and counts length-k vertex prefixes, keyed as
/// "v0-v1-...-vk". Trajectories shorter than k+1 vertices are keyed by
/// their full (shorter) sequence.
std::map<std::string, std::uint64_t> path_distribution(
    const std::function<Trajectory(Rng&)>& sampler, std::uint64_t k,
    std::uint64_t n, Rng& rng);

/// Formats the first k moves of a trajectory as the path_distribution key.
std::string path_key(const Trajectory& t, std::uint64_t k);

}  // namespace vrjplab::processes
