#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vrjplab/coupling.hpp"
#include "vrjplab/graphs.hpp"
#include "vrjplab/linalg.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/stats.hpp"

namespace vrjplab::experiments {

/// Statistical thresholds used across the suite.
inline constexpr double kKsSignificance = 0.001;
inline constexpr double kChi2Significance = 0.001;

/// Runs fn(replicate_index, rng) for every index in [0, n), each with its
/// own substream Rng(master_seed, fnv1a64(tag), index). Results land in a
/// replicate-indexed vector, so the output is bit-identical for any thread
/// count. The first exception thrown by a worker is rethrown after join.
template <typename T>
std::vector<T> replicate_map(std::uint64_t master_seed, std::string_view tag,
                             std::uint64_t n, int threads,
                             const std::function<T(std::uint64_t, Rng&)>& fn) {
  std::vector<T> out(n);
  const std::uint64_t tag_h = fnv1a64(tag);
  const std::uint64_t nt =
      std::min<std::uint64_t>(threads < 1 ? 1 : threads, n == 0 ? 1 : n);
  if (nt <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) {
      Rng rng(master_seed, tag_h, i);
      out[i] = fn(i, rng);
    }
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::uint64_t t = 0; t < nt; ++t) {
    pool.emplace_back([&]() {
      try {
        for (;;) {
          const std::uint64_t i = next.fetch_add(1);
          if (i >= n) break;
          Rng rng(master_seed, tag_h, i);
          out[i] = fn(i, rng);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// ---- convex order -----------------------------------------------------------

/// One test function for the convex-order comparison. Non-convex entries
/// (the linear calibration) are checked two-sided instead of one-sided.
struct FunctionSpec {
  std::string name;
  std::function<double(double)> f;
  bool convex = true;
};

/// x^2, exp(-x), max(1-10x, 0), plus the linear calibration control.
std::vector<FunctionSpec> default_convex_family();

struct FunctionComparison {
  std::string fname;
  bool convex = true;
  McEstimate minus_est;
  McEstimate plus_est;
  double z = 0.0;  // (mean_minus - mean_plus) / combined stderr
  bool pass = false;
};

struct ConvexOrderResult {
  std::vector<FunctionComparison> rows;
  TestReport report;
};

/// Independent MC estimates of E f(sum_j x_j G(i,j)/G(i,i)) under the two
/// edgewise-ordered weight assignments; convex rows must satisfy
/// mean_minus >= mean_plus - 2*combined stderr, the linear calibration must
/// agree two-sided within 3.
ConvexOrderResult convex_order_experiment(
    const graphs::WeightedGraph& g, const std::vector<double>& w_minus_edges,
    const std::vector<double>& w_plus_edges, int i,
    const std::vector<double>& x, const std::vector<FunctionSpec>& f_family,
    std::uint64_t n, std::uint64_t seed, int threads);

// ---- monotonicity scan -------------------------------------------------------

/// Row-major id of the center vertex of a side^d box.
int lattice_center(int d, int side);

struct ScanRow {
  double w = 0.0;
  std::vector<McEstimate> f_est;  // one per slope in ScanResult::ms
};

struct ScanResult {
  std::vector<int> ms;  // slopes of the truncated-linear test functions
  std::vector<ScanRow> rows;
  TestReport report;
};

/// For each weight w (ascending), samples the potential on the ball
/// quotient of the side^d box around x0 (radius = eccentricity - 1,
/// clamped to >= 1) and estimates E[max(1 - m*psi, 0)] for m in {1,10,100}.
/// Passes iff every column is nonincreasing in w within 2-stderr slack.
/// x0 = -1 selects the center vertex.
ScanResult monotonicity_scan(int d, int side,
                             const std::vector<double>& weights, int x0,
                             std::uint64_t n, std::uint64_t seed, int threads);

// ---- process equivalences ------------------------------------------------------

/// Chi-square comparison of length-k path histograms between the direct
/// reinforced walk and the Gamma-weight jump-process representation.
TestReport errw_equivalence_experiment(const graphs::WeightedGraph& g,
                                       const std::vector<double>& a_edges,
                                       int x0, std::uint64_t k,
                                       std::uint64_t n, std::uint64_t seed);

/// Chi-square comparison of the jump-process skeleton against the walk in
/// potential-field conductances (fresh potential per replicate).
TestReport vrjp_conductance_equivalence(const graphs::WeightedGraph& g,
                                        int x0, std::uint64_t k,
                                        std::uint64_t n, std::uint64_t seed);

// ---- effective weight ---------------------------------------------------------

struct EffWeightResult {
  double c_eff = 0.0;
  McEstimate w_eff;
  TestReport report;
};

/// MC mean of the effective weight over potential samples against the
/// effective conductance of the deterministic weights; one-sided pass
/// mean <= c_eff + 2*stderr.
EffWeightResult eff_weight_experiment(const graphs::WeightedGraph& g, int x0,
                                      int delta, std::uint64_t n,
                                      std::uint64_t seed, int threads);

// ---- conditional martingale ----------------------------------------------------

enum class MartingaleMode {
  kGivenHInf,  // fix (inner H, gamma), redraw U+
  kGivenHPlus  // fix (inner H, gamma, U+), redraw the two-point U-
};

struct MartingaleResult {
  int hits = 0;
  int outer = 0;
  TestReport report;
};

/// For `outer` fixed conditioning draws, averages the bilinear form
/// X1^T G X2 over `inner` conditional redraws and compares with the exact
/// conditional target; passes iff at least 95% of the outer draws agree
/// within 4 stderr (exact comparison when the conditional law degenerates).
MartingaleResult martingale_experiment(
    const linalg::SymMatrix& w_inner, const std::vector<double>& w1,
    const std::vector<double>& w2, double w_minus, double w_plus,
    const std::vector<double>& x1, const std::vector<double>& x2, int outer,
    std::uint64_t inner, MartingaleMode mode, std::uint64_t seed, int threads);

// ---- standard coupling fixture ----------------------------------------------

/// A fixed small coupling configuration shared by the suite, the acceptance
/// checks and the CLI: a 3-vertex inner path, asymmetric boundary weights,
/// and an asymmetric construction vector (so the direction lambda is not
/// 1/2 and orientation defects are visible).
struct TripleConfig {
  linalg::SymMatrix w_inner;
  std::vector<double> w1;
  std::vector<double> w2;
  double w_minus = 0.0;
  double w_plus = 0.0;
  std::vector<double> x1;
};

TripleConfig standard_triple_config();

/// Weight matrix of the full (n+2)-vertex graph with the pair edge set to
/// w_pair; used by direct-sampler comparisons.
linalg::SymMatrix full_weight_matrix(const TripleConfig& cfg, double w_pair);

// ---- suite -------------------------------------------------------------------

struct SuiteResult {
  std::vector<TestReport> reports;
  TestReport aggregate;
};

/// Runs the registered test list. config_text is a JSON object
/// {"seed": u64, "threads": int, "tests": [{"name": str, "params": {...}}]};
/// empty selects the default configuration. Unknown test names and zero
/// replicate counts raise ConfigError; statistical failures are recorded in
/// the reports, not thrown.
SuiteResult run_suite(const std::string& config_text);

/// The default configuration as pretty-printed JSON.
std::string default_suite_config();

/// Names accepted in the config's tests[].name, in default execution order.
std::vector<std::string> suite_test_names();

/// Serializes reports as CSV (with header) or JSONL.
void emit_reports(const std::vector<TestReport>& reports,
                  const std::string& format, std::ostream& out);

}  // namespace vrjplab::experiments
