#include "vrjplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <limits>
#include <stdexcept>

#include "vrjplab/distributions.hpp"

namespace vrjplab {

McEstimate mc_estimate(const std::vector<double>& xs) {
  if (xs.size() < 2)
    throw std::invalid_argument("mc_estimate: need at least 2 samples");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  McEstimate e;
  e.mean = mean;
  e.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  e.n = xs.size();
  return e;
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string TestReport::jsonl_line() const {
  std::string s = "{\"test\":\"" + json_escape(test) + "\"";
  s += ",\"statistic\":" + fmt_g17(statistic);
  s += ",\"threshold\":" + fmt_g17(threshold);
  s += ",\"pass\":";
  s += pass ? "true" : "false";
  s += ",\"seed\":" + std::to_string(seed);
  s += ",\"params\":\"" + json_escape(params) + "\"}";
  return s;
}

std::string TestReport::csv_header() {
  return "test,statistic,threshold,pass,seed,params";
}

std::string TestReport::csv_row() const {
  std::string s = "\"" + test + "\",";
  s += fmt_g17(statistic) + "," + fmt_g17(threshold) + ",";
  s += pass ? "true" : "false";
  s += "," + std::to_string(seed) + ",\"" + params + "\"";
  return s;
}

// Two complementary series for the Kolmogorov distribution; the direct
// alternating series converges fast for large t, the Jacobi-theta dual form
// for small t.  Crossover at t = 1.18 keeps both to a handful of terms.
double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 1.18) {
    // P(D <= t) = sqrt(2 pi)/t * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 t^2))
    const double a = std::numbers::pi * std::numbers::pi / (8.0 * t * t);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double term = std::exp(-static_cast<double>(2 * k - 1) *
                                   static_cast<double>(2 * k - 1) * a);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / t * sum;
    double q = 1.0 - cdf;
    if (q < 0.0) q = 0.0;
    return q;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * static_cast<double>(k) *
                                 static_cast<double>(k) * t * t);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  double q = 2.0 * sum;
  if (q < 0.0) q = 0.0;
  if (q > 1.0) q = 1.0;
  return q;
}

double ks_pvalue(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(f - lo, hi - f));
  }
  return d;
}

double ks_statistic_two(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic_two: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

TestReport ks_test(const std::string& name, std::vector<double> samples,
                   const std::function<double(double)>& cdf,
                   double significance, std::uint64_t seed,
                   const std::string& params) {
  const double n = static_cast<double>(samples.size());
  const double d = ks_statistic(std::move(samples), cdf);
  const double p = ks_pvalue(d, n);
  TestReport r;
  r.test = name;
  r.statistic = p;
  r.threshold = significance;
  r.pass = p > significance;
  r.seed = seed;
  r.params = params + ",D=" + fmt_g17(d);
  return r;
}

TestReport ks_test_two(const std::string& name, std::vector<double> a,
                       std::vector<double> b, double significance,
                       std::uint64_t seed, const std::string& params) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double d = ks_statistic_two(std::move(a), std::move(b));
  const double p = ks_pvalue(d, na * nb / (na + nb));
  TestReport r;
  r.test = name;
  r.statistic = p;
  r.threshold = significance;
  r.pass = p > significance;
  r.seed = seed;
  r.params = params + ",D=" + fmt_g17(d);
  return r;
}

namespace {

struct Cell {
  std::string key;
  double o1 = 0.0;
  double o2 = 0.0;  // second sample or expected probability, by context
};

// Pools cells until every pooled expected count reaches min_expected,
// merging the smallest-expected cell into the next smallest (deterministic:
// ties broken by key order since cells stay sorted by (expected, key)).
void pool_cells(std::vector<Cell>& cells,
                const std::function<double(const Cell&)>& expected,
                double min_expected) {
  auto cmp = [&](const Cell& a, const Cell& b) {
    const double ea = expected(a), eb = expected(b);
    if (ea != eb) return ea < eb;
    return a.key < b.key;
  };
  std::sort(cells.begin(), cells.end(), cmp);
  while (cells.size() > 1 && expected(cells.front()) < min_expected) {
    cells[1].o1 += cells[0].o1;
    cells[1].o2 += cells[0].o2;
    cells[1].key = cells[0].key + "|" + cells[1].key;
    cells.erase(cells.begin());
    std::sort(cells.begin(), cells.end(), cmp);
  }
}

}  // namespace

Chi2Result chi2_two_sample(const std::map<std::string, std::uint64_t>& c1,
                           const std::map<std::string, std::uint64_t>& c2,
                           double min_expected) {
  std::map<std::string, Cell> merged;
  for (const auto& [k, v] : c1) merged[k].o1 = static_cast<double>(v);
  for (const auto& [k, v] : c2) merged[k].o2 = static_cast<double>(v);
  std::vector<Cell> cells;
  cells.reserve(merged.size());
  for (auto& [k, c] : merged) {
    c.key = k;
    cells.push_back(c);
  }
  double n1 = 0.0, n2 = 0.0;
  for (const auto& c : cells) {
    n1 += c.o1;
    n2 += c.o2;
  }
  if (n1 == 0.0 || n2 == 0.0)
    throw std::invalid_argument("chi2_two_sample: empty sample");
  const double ntot = n1 + n2;
  // Expected count in the *smaller* margin drives pooling validity.
  const double nmin = std::min(n1, n2);
  pool_cells(
      cells,
      [&](const Cell& c) { return nmin * (c.o1 + c.o2) / ntot; },
      min_expected);
  Chi2Result res;
  if (cells.size() <= 1) {
    res.statistic = 0.0;
    res.df = 0.0;
    res.pvalue = 1.0;
    return res;
  }
  double stat = 0.0;
  for (const auto& c : cells) {
    const double pool = (c.o1 + c.o2) / ntot;
    const double e1 = n1 * pool;
    const double e2 = n2 * pool;
    stat += (c.o1 - e1) * (c.o1 - e1) / e1;
    stat += (c.o2 - e2) * (c.o2 - e2) / e2;
  }
  res.statistic = stat;
  res.df = static_cast<double>(cells.size() - 1);
  res.pvalue = chi2_sf(stat, res.df);
  return res;
}

Chi2Result chi2_one_sample(const std::map<std::string, std::uint64_t>& counts,
                           const std::map<std::string, double>& probs,
                           double min_expected) {
  double n = 0.0;
  for (const auto& [k, v] : counts) n += static_cast<double>(v);
  if (n == 0.0) throw std::invalid_argument("chi2_one_sample: empty sample");
  std::vector<Cell> cells;
  for (const auto& [k, p] : probs) {
    Cell c;
    c.key = k;
    auto it = counts.find(k);
    c.o1 = (it == counts.end()) ? 0.0 : static_cast<double>(it->second);
    c.o2 = p;
    cells.push_back(c);
  }
  // Any observed key missing from probs means the model assigns it
  // probability zero: that is an immediate failure.
  for (const auto& [k, v] : counts) {
    if (v > 0 && probs.find(k) == probs.end()) {
      Chi2Result res;
      res.statistic = std::numeric_limits<double>::infinity();
      res.df = 1.0;
      res.pvalue = 0.0;
      return res;
    }
  }
  pool_cells(
      cells, [&](const Cell& c) { return n * c.o2; }, min_expected);
  Chi2Result res;
  if (cells.size() <= 1) {
    res.pvalue = 1.0;
    return res;
  }
  double stat = 0.0;
  for (const auto& c : cells) {
    const double e = n * c.o2;
    stat += (c.o1 - e) * (c.o1 - e) / e;
  }
  res.statistic = stat;
  res.df = static_cast<double>(cells.size() - 1);
  res.pvalue = chi2_sf(stat, res.df);
  return res;
}

}  // namespace vrjplab
