// Statistical test harness: Monte-Carlo estimates, test reports,
// Kolmogorov-Smirnov tests (one- and two-sample), and chi-square
// goodness-of-fit with cell pooling.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace vrjplab {

// Sample mean with standard error (sample std / sqrt(n)).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

McEstimate mc_estimate(const std::vector<double>& xs);

// One test outcome; serializes to a single JSONL object or CSV row.
struct TestReport {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string params;

  std::string jsonl_line() const;
  std::string csv_row() const;
  static std::string csv_header();
};

// Formats a double with 17 significant digits (%.17g), the round-trip-exact
// serialization used for every float the tool emits.
std::string fmt_g17(double v);

// ---- Kolmogorov-Smirnov ------------------------------------------------------

// Kolmogorov asymptotic survival function Q(t) = 2 sum (-1)^{k-1} e^{-2k^2t^2},
// evaluated through the dual (Jacobi theta) series for small t.
double kolmogorov_q(double t);

// P-value of a KS distance D at effective sample size n_eff, using the
// Stephens small-sample correction (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.
double ks_pvalue(double d, double n_eff);

// One-sample KS distance against a CDF; samples need not be sorted.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Two-sample KS distance.
double ks_statistic_two(std::vector<double> a, std::vector<double> b);

// Convenience wrappers producing full reports; pass iff p > significance.
TestReport ks_test(const std::string& name, std::vector<double> samples,
                   const std::function<double(double)>& cdf,
                   double significance, std::uint64_t seed,
                   const std::string& params);
TestReport ks_test_two(const std::string& name, std::vector<double> a,
                       std::vector<double> b, double significance,
                       std::uint64_t seed, const std::string& params);

// ---- chi-square ---------------------------------------------------------------

// Two-sample chi-square on keyed counts (e.g. path histograms).  Cells whose
// pooled expected count falls below min_expected are merged, smallest
// expected first with deterministic key tie-break.  Returns the p-value
// through chi2_sf with df = (#cells - 1).
struct Chi2Result {
  double statistic = 0.0;
  double df = 0.0;
  double pvalue = 1.0;
};

Chi2Result chi2_two_sample(const std::map<std::string, std::uint64_t>& c1,
                           const std::map<std::string, std::uint64_t>& c2,
                           double min_expected = 5.0);

// One-sample chi-square of counts against exact cell probabilities.
Chi2Result chi2_one_sample(const std::map<std::string, std::uint64_t>& counts,
                           const std::map<std::string, double>& probs,
                           double min_expected = 5.0);

}  // namespace vrjplab
