// Command-line interface for the vrjplab library: exact field sampling,
// process simulation, coupling verification, and the statistical test suite.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vrjplab/betafield.hpp"
#include "vrjplab/coupling.hpp"
#include "vrjplab/distributions.hpp"
#include "vrjplab/electrical.hpp"
#include "vrjplab/errors.hpp"
#include "vrjplab/experiments.hpp"
#include "vrjplab/graphs.hpp"
#include "vrjplab/linalg.hpp"
#include "vrjplab/processes.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/stats.hpp"

namespace {

using vrjplab::ConfigError;
using vrjplab::fmt_g17;
using vrjplab::Rng;
using vrjplab::TestReport;

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError("empty numeric list");
  return out;
}

vrjplab::graphs::WeightedGraph resolve_graph(const std::string& graph_path,
                                             const std::string& lattice) {
  if (!graph_path.empty() && !lattice.empty()) {
    throw ConfigError("--graph and --lattice are mutually exclusive");
  }
  if (!graph_path.empty()) {
    return vrjplab::graphs::load_graph_file(graph_path);
  }
  if (!lattice.empty()) {
    std::stringstream ss(lattice);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ',')) parts.push_back(part);
    if (parts.size() != 3) {
      throw ConfigError("--lattice expects d,L,w");
    }
    int d = 0, side = 0;
    double w = 0.0;
    try {
      d = std::stoi(parts[0]);
      side = std::stoi(parts[1]);
      w = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse --lattice '" + lattice + "'");
    }
    return vrjplab::graphs::lattice_box(d, side, w);
  }
  throw ConfigError("one of --graph or --lattice is required");
}

std::vector<double> graph_edge_weights(const vrjplab::graphs::WeightedGraph& g) {
  std::vector<double> w;
  w.reserve(g.edges().size());
  for (const auto& e : g.edges()) w.push_back(e.w);
  return w;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class OutputStream {
 public:
  explicit OutputStream(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void check_format(const std::string& format) {
  if (format != "csv" && format != "jsonl") {
    throw ConfigError("--format must be csv or jsonl");
  }
}

int run_sample_beta(const std::string& graph_path, const std::string& lattice,
                    const std::string& eta_arg, std::uint64_t n,
                    std::uint64_t seed, int threads,
                    const std::string& out_path, const std::string& format) {
  const auto g = resolve_graph(graph_path, lattice);
  const auto w = vrjplab::graphs::weight_matrix(g);
  vrjplab::betafield::EtaVector eta =
      (eta_arg == "zero")
          ? vrjplab::betafield::EtaVector::zero(w.dim())
          : vrjplab::betafield::EtaVector(parse_csv_doubles(eta_arg));
  if (eta.dim() != w.dim()) {
    throw ConfigError("--eta length does not match vertex count");
  }
  if (n == 0) throw ConfigError("--n must be positive");
  const auto rows = vrjplab::experiments::replicate_map<std::vector<double>>(
      seed, "cli/sample-beta", n, threads,
      [&](std::uint64_t, Rng& rng) {
        const auto bs = vrjplab::betafield::sample_beta(w, eta, rng);
        const auto h = vrjplab::betafield::h_from_beta(bs);
        std::vector<double> row = bs.beta;
        row.push_back(std::exp(vrjplab::linalg::logdet_pd(h.m)));
        return row;
      });
  OutputStream os(out_path);
  if (format == "csv") {
    os.get() << "replicate";
    for (int v = 0; v < w.dim(); ++v) os.get() << ",beta_" << v;
    os.get() << ",det_h\n";
    for (std::uint64_t r = 0; r < n; ++r) {
      os.get() << r;
      for (double v : rows[r]) os.get() << ',' << fmt_g17(v);
      os.get() << '\n';
    }
  } else {
    for (std::uint64_t r = 0; r < n; ++r) {
      os.get() << "{\"replicate\":" << r << ",\"beta\":[";
      for (int v = 0; v < w.dim(); ++v) {
        if (v) os.get() << ',';
        os.get() << fmt_g17(rows[r][v]);
      }
      os.get() << "],\"det_h\":" << fmt_g17(rows[r].back()) << "}\n";
    }
  }
  return 0;
}

int run_simulate(const std::string& graph_path, const std::string& lattice,
                 const std::string& model, int start, std::uint64_t steps,
                 std::uint64_t n, std::uint64_t seed, int threads,
                 const std::string& out_path, const std::string& format) {
  const auto g = resolve_graph(graph_path, lattice);
  if (n == 0) throw ConfigError("--n must be positive");
  if (steps == 0) throw ConfigError("--steps must be positive");
  const auto a = graph_edge_weights(g);
  const auto wm = vrjplab::graphs::weight_matrix(g);
  namespace pr = vrjplab::processes;
  std::function<pr::Trajectory(std::uint64_t, Rng&)> sim;
  if (model == "errw") {
    sim = [&](std::uint64_t, Rng& rng) {
      return pr::simulate_errw(g, a, start, steps, rng);
    };
  } else if (model == "vrjp") {
    sim = [&](std::uint64_t, Rng& rng) {
      return pr::simulate_vrjp(g, start, steps, rng);
    };
  } else if (model == "errw-via-vrjp") {
    sim = [&](std::uint64_t, Rng& rng) {
      return pr::errw_via_vrjp(g, a, start, steps, rng);
    };
  } else if (model == "rwrc") {
    sim = [&](std::uint64_t, Rng& rng) {
      const auto bs = vrjplab::betafield::sample_beta(
          wm, vrjplab::betafield::EtaVector::zero(wm.dim()), rng);
      const auto gm = vrjplab::betafield::green(vrjplab::betafield::h_from_beta(bs));
      const auto c = pr::conductances_from_beta(gm, g, start);
      return pr::rw_conductances(g, c, start, steps, rng);
    };
  } else {
    throw ConfigError("--model must be errw, vrjp, errw-via-vrjp, or rwrc");
  }
  const auto trajs = vrjplab::experiments::replicate_map<pr::Trajectory>(
      seed, "cli/simulate-" + model, n, threads, sim);
  OutputStream os(out_path);
  const bool has_time = (model == "vrjp");
  if (format == "csv") {
    os.get() << "replicate,step,vertex,time\n";
    for (std::uint64_t r = 0; r < n; ++r) {
      const auto& t = trajs[r];
      for (std::size_t s = 0; s < t.vertices.size(); ++s) {
        os.get() << r << ',' << s << ',' << t.vertices[s] << ',';
        if (has_time) {
          os.get() << fmt_g17(s == 0 ? 0.0 : t.jump_times[s - 1]);
        }
        os.get() << '\n';
      }
    }
  } else {
    for (std::uint64_t r = 0; r < n; ++r) {
      const auto& t = trajs[r];
      for (std::size_t s = 0; s < t.vertices.size(); ++s) {
        os.get() << "{\"replicate\":" << r << ",\"step\":" << s
                 << ",\"vertex\":" << t.vertices[s] << ",\"time\":";
        if (has_time) {
          os.get() << fmt_g17(s == 0 ? 0.0 : t.jump_times[s - 1]);
        } else {
          os.get() << "null";
        }
        os.get() << "}\n";
      }
    }
  }
  return 0;
}

int run_couple_check(const std::string& graph_path, const std::string& lattice,
                     double w_minus, double w_plus, const std::string& x1_arg,
                     std::uint64_t n, std::uint64_t seed, int threads,
                     const std::string& out_path, const std::string& format) {
  const auto g = resolve_graph(graph_path, lattice);
  const int total = g.n_vertices();
  if (total < 3) {
    throw ConfigError("couple-check needs at least 3 vertices (inner graph plus the modified pair)");
  }
  const int inner_n = total - 2;
  if (g.has_edge(inner_n, inner_n + 1)) {
    throw ConfigError(
        "the last two vertices form the modified pair; do not give them an "
        "explicit edge (use --wminus/--wplus)");
  }
  if (n == 0) throw ConfigError("--n must be positive");
  const auto w_full = vrjplab::graphs::weight_matrix(g);
  vrjplab::linalg::SymMatrix w_inner(inner_n);
  std::vector<double> w1(inner_n), w2(inner_n);
  for (int i = 0; i < inner_n; ++i) {
    for (int j = i + 1; j < inner_n; ++j) w_inner.set(i, j, w_full(i, j));
    w1[i] = w_full(i, inner_n);
    w2[i] = w_full(i, inner_n + 1);
  }
  const std::vector<double> x1 = parse_csv_doubles(x1_arg);
  if (static_cast<int>(x1.size()) != total) {
    throw ConfigError("--x1 length must match the vertex count");
  }

  namespace cp = vrjplab::coupling;
  struct Row {
    double three_way, assembly, energy, det, kappa, gamma;
  };
  const auto rows = vrjplab::experiments::replicate_map<Row>(
      seed, "cli/couple-check", n, threads, [&](std::uint64_t, Rng& rng) {
        const auto h = cp::sample_inner(w_inner, w1, w2, rng);
        const auto t =
            cp::couple_triple(h, w1, w2, w_minus, w_plus, x1, rng);
        const auto audit = cp::audit_triple(t);
        Row row{};
        row.three_way = audit.three_way_stable;
        row.assembly =
            std::max(audit.matrix_vs_stable, audit.three_way_matrix) /
            audit.cond_tol;
        row.energy = audit.energy_err;
        row.det = audit.det_err / audit.det_tol;
        row.kappa = audit.kappa_hat;
        row.gamma = audit.gamma;
        return row;
      });

  double max_three = 0.0, max_assembly = 0.0, max_energy = 0.0,
         max_det = 0.0, max_kappa = 0.0;
  std::vector<double> gammas(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    max_three = std::max(max_three, rows[r].three_way);
    max_assembly = std::max(max_assembly, rows[r].assembly);
    max_energy = std::max(max_energy, rows[r].energy);
    max_det = std::max(max_det, rows[r].det);
    max_kappa = std::max(max_kappa, rows[r].kappa);
    gammas[r] = rows[r].gamma;
  }
  std::vector<TestReport> reports;
  const std::string params = "n=" + std::to_string(n) +
                             ",wminus=" + fmt_g17(w_minus) +
                             ",wplus=" + fmt_g17(w_plus);
  const std::string params_cond = params + ",kappa_max=" + fmt_g17(max_kappa);
  auto exact = [&](const std::string& name, double stat) {
    TestReport rep;
    rep.test = name;
    rep.statistic = stat;
    rep.threshold = 1e-9;
    rep.pass = stat <= 1e-9;
    rep.seed = seed;
    rep.params = params;
    return rep;
  };
  // Matrix-path checks carry per-draw tolerances max(1e-9, 64*eps*kappa):
  // the statistic is the worst error-to-tolerance ratio.
  auto conditioned = [&](const std::string& name, double stat) {
    TestReport rep;
    rep.test = name;
    rep.statistic = stat;
    rep.threshold = 1.0;
    rep.pass = stat <= 1.0;
    rep.seed = seed;
    rep.params = params_cond;
    return rep;
  };
  reports.push_back(exact("couple_check/three_way", max_three));
  reports.push_back(exact("couple_check/energy", max_energy));
  reports.push_back(conditioned("couple_check/assembly", max_assembly));
  reports.push_back(conditioned("couple_check/pair_det", max_det));
  reports.push_back(vrjplab::ks_test(
      "couple_check/gamma", gammas,
      [](double x) { return vrjplab::gamma_cdf(x, 0.5, 0.5); },
      vrjplab::experiments::kKsSignificance, seed, params));

  OutputStream os(out_path);
  vrjplab::experiments::emit_reports(reports, format, os.get());
  for (const auto& r : reports) {
    if (!r.pass) return 1;
  }
  return 0;
}

int run_eff(const std::string& graph_path, const std::string& lattice, int x0,
            int delta, std::uint64_t beta_samples, std::uint64_t seed,
            int threads, const std::string& out_path,
            const std::string& format) {
  const auto g = resolve_graph(graph_path, lattice);
  const auto res = vrjplab::experiments::eff_weight_experiment(
      g, x0, delta, beta_samples, seed, threads);
  OutputStream os(out_path);
  if (format == "csv") {
    os.get() << "c_eff,w_eff_mean,w_eff_stderr,n\n"
             << fmt_g17(res.c_eff) << ',' << fmt_g17(res.w_eff.mean) << ','
             << fmt_g17(res.w_eff.std_error) << ',' << res.w_eff.n << '\n';
  } else {
    os.get() << "{\"c_eff\":" << fmt_g17(res.c_eff)
             << ",\"w_eff_mean\":" << fmt_g17(res.w_eff.mean)
             << ",\"w_eff_stderr\":" << fmt_g17(res.w_eff.std_error)
             << ",\"n\":" << res.w_eff.n << "}\n";
  }
  return 0;
}

int run_convex_order(const std::string& graph_path,
                     const std::string& lattice, double w_minus,
                     double w_plus, int i, const std::string& x_arg,
                     std::uint64_t n, std::uint64_t seed, int threads,
                     const std::string& out_path, const std::string& format) {
  const auto g = resolve_graph(graph_path, lattice);
  const std::vector<double> wm(g.edges().size(), w_minus);
  const std::vector<double> wp(g.edges().size(), w_plus);
  std::vector<double> x;
  if (x_arg == "ones") {
    x.assign(g.n_vertices(), 1.0);
  } else {
    x = parse_csv_doubles(x_arg);
  }
  const auto res = vrjplab::experiments::convex_order_experiment(
      g, wm, wp, i, x, vrjplab::experiments::default_convex_family(), n, seed,
      threads);
  OutputStream os(out_path);
  if (format == "csv") {
    os.get() << "f,convex,mean_minus,stderr_minus,mean_plus,stderr_plus,z,pass\n";
    for (const auto& row : res.rows) {
      os.get() << row.fname << ',' << (row.convex ? 1 : 0) << ','
               << fmt_g17(row.minus_est.mean) << ','
               << fmt_g17(row.minus_est.std_error) << ','
               << fmt_g17(row.plus_est.mean) << ','
               << fmt_g17(row.plus_est.std_error) << ',' << fmt_g17(row.z)
               << ',' << (row.pass ? 1 : 0) << '\n';
    }
  } else {
    for (const auto& row : res.rows) {
      os.get() << "{\"f\":\"" << row.fname << "\",\"convex\":"
               << (row.convex ? "true" : "false")
               << ",\"mean_minus\":" << fmt_g17(row.minus_est.mean)
               << ",\"stderr_minus\":" << fmt_g17(row.minus_est.std_error)
               << ",\"mean_plus\":" << fmt_g17(row.plus_est.mean)
               << ",\"stderr_plus\":" << fmt_g17(row.plus_est.std_error)
               << ",\"z\":" << fmt_g17(row.z)
               << ",\"pass\":" << (row.pass ? "true" : "false") << "}\n";
    }
  }
  std::cerr << res.report.test << ": " << (res.report.pass ? "PASS" : "FAIL")
            << " (statistic=" << fmt_g17(res.report.statistic) << ")\n";
  return res.report.pass ? 0 : 1;
}

int run_scan(int d, int side, const std::string& weights_arg, int x0,
             std::uint64_t n, std::uint64_t seed, int threads,
             const std::string& out_path, const std::string& format) {
  const std::vector<double> weights = parse_csv_doubles(weights_arg);
  const auto res = vrjplab::experiments::monotonicity_scan(d, side, weights,
                                                           x0, n, seed,
                                                           threads);
  OutputStream os(out_path);
  if (format == "csv") {
    os.get() << "w";
    for (int m : res.ms) os.get() << ",mean_f" << m << ",stderr_f" << m;
    os.get() << '\n';
    for (const auto& row : res.rows) {
      os.get() << fmt_g17(row.w);
      for (const auto& est : row.f_est) {
        os.get() << ',' << fmt_g17(est.mean) << ',' << fmt_g17(est.std_error);
      }
      os.get() << '\n';
    }
  } else {
    for (const auto& row : res.rows) {
      os.get() << "{\"w\":" << fmt_g17(row.w);
      for (std::size_t mi = 0; mi < res.ms.size(); ++mi) {
        os.get() << ",\"mean_f" << res.ms[mi]
                 << "\":" << fmt_g17(row.f_est[mi].mean) << ",\"stderr_f"
                 << res.ms[mi] << "\":" << fmt_g17(row.f_est[mi].std_error);
      }
      os.get() << "}\n";
    }
  }
  std::cerr << res.report.test << ": " << (res.report.pass ? "PASS" : "FAIL")
            << " (statistic=" << fmt_g17(res.report.statistic) << ")\n";
  return res.report.pass ? 0 : 1;
}

int run_suite_cmd(const std::string& config_path, bool print_default,
                  std::uint64_t seed, bool seed_given, int threads,
                  bool threads_given, const std::string& out_path,
                  const std::string& format) {
  if (print_default) {
    std::cout << vrjplab::experiments::default_suite_config() << '\n';
    return 0;
  }
  std::string text;
  if (!config_path.empty()) {
    text = read_file(config_path);
  } else {
    text = vrjplab::experiments::default_suite_config();
  }
  // Command-line seed/threads override the config file values.
  if (seed_given || threads_given) {
    auto j = nlohmann::json::parse(text);
    if (seed_given) j["seed"] = seed;
    if (threads_given) j["threads"] = threads;
    text = j.dump();
  }
  const auto res = vrjplab::experiments::run_suite(text);
  std::vector<TestReport> all = res.reports;
  all.push_back(res.aggregate);
  OutputStream os(out_path);
  vrjplab::experiments::emit_reports(all, format, os.get());
  std::cerr << "suite: " << (res.aggregate.pass ? "PASS" : "FAIL") << " ("
            << res.aggregate.params << ")\n";
  return res.aggregate.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vrjplab: exact field samplers, reinforced processes, and "
               "coupling experiments on finite weighted graphs"};
  app.require_subcommand(1);

  std::uint64_t seed = 20250817ULL;
  int threads = 1;
  std::string out_path;
  std::string format = "jsonl";
  auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads for replicates")
          ->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "Output path (default: stdout)");
  app.add_option("--format", format, "Output format: csv or jsonl");

  std::string graph_path, lattice;
  const auto add_graph_opts = [&](CLI::App* sub) {
    sub->add_option("--graph", graph_path, "Edge-list file (u v w per line)");
    sub->add_option("--lattice", lattice, "Lattice box spec d,L,w");
    sub->fallthrough();
  };

  // sample-beta
  std::string eta_arg = "zero";
  std::uint64_t sb_n = 1000;
  auto* sb = app.add_subcommand("sample-beta", "Sample the field exactly");
  add_graph_opts(sb);
  sb->add_option("--eta", eta_arg, "Comma-separated eta values or 'zero'");
  sb->add_option("--n", sb_n, "Number of replicates");

  // simulate
  std::string model = "errw";
  int start = 0;
  std::uint64_t steps = 10, sim_n = 100;
  auto* sim = app.add_subcommand("simulate", "Simulate a reinforced process");
  add_graph_opts(sim);
  sim->add_option("--model", model, "errw | vrjp | errw-via-vrjp | rwrc");
  sim->add_option("--start", start, "Start vertex");
  sim->add_option("--steps", steps, "Steps (jumps for vrjp)");
  sim->add_option("--n", sim_n, "Number of trajectories");

  // couple-check
  double cc_wminus = 0.5, cc_wplus = 1.0;
  std::string x1_arg;
  std::uint64_t cc_n = 10000;
  auto* cc = app.add_subcommand(
      "couple-check",
      "Verify the coupled construction on a graph whose last two vertices "
      "are the modified pair");
  add_graph_opts(cc);
  cc->add_option("--wminus", cc_wminus, "Lower pair weight")->required();
  cc->add_option("--wplus", cc_wplus, "Upper pair weight")->required();
  cc->add_option("--x1", x1_arg, "Comma-separated nonnegative test vector")
      ->required();
  cc->add_option("--n", cc_n, "Number of replicates");

  // eff
  int eff_x0 = 0, eff_delta = 1;
  std::uint64_t beta_samples = 10000;
  auto* eff = app.add_subcommand("eff",
                                 "Effective conductance and sampled "
                                 "effective weight");
  add_graph_opts(eff);
  eff->add_option("--x0", eff_x0, "Source vertex");
  eff->add_option("--delta", eff_delta, "Sink vertex");
  eff->add_option("--beta-samples", beta_samples,
                  "Field samples for the mean");

  // convex-order
  double co_wminus = 0.5, co_wplus = 2.0;
  int co_i = 0;
  std::string x_arg = "ones";
  std::uint64_t co_n = 10000;
  auto* co = app.add_subcommand("convex-order",
                                "Convex-order comparison between two "
                                "constant weight levels");
  add_graph_opts(co);
  co->add_option("--wminus", co_wminus, "Lower constant weight");
  co->add_option("--wplus", co_wplus, "Upper constant weight");
  co->add_option("--i", co_i, "Observation vertex");
  co->add_option("--x", x_arg, "Comma-separated test vector or 'ones'");
  co->add_option("--n", co_n, "Replicates per side");

  // scan
  int scan_d = 2, scan_side = 5, scan_x0 = -1;
  std::string weights_arg = "0.5,1,2";
  std::uint64_t scan_n = 5000;
  auto* sc = app.add_subcommand("scan",
                                "Monotonicity scan of return-probability "
                                "surrogates over lattice weights");
  sc->add_option("--d", scan_d, "Lattice dimension");
  sc->add_option("--side", scan_side, "Lattice side length");
  sc->add_option("--weights", weights_arg, "Ascending comma-separated weights");
  sc->add_option("--x0", scan_x0, "Base vertex (-1 = center)");
  sc->add_option("--n", scan_n, "Replicates per weight");
  sc->fallthrough();

  // suite
  std::string config_path;
  bool print_default = false;
  auto* su = app.add_subcommand("suite", "Run the statistical test suite");
  su->add_option("--config", config_path, "Suite config JSON file");
  su->add_flag("--print-default-config", print_default,
               "Print the default config and exit");
  su->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    check_format(format);
    if (app.got_subcommand(sb)) {
      return run_sample_beta(graph_path, lattice, eta_arg, sb_n, seed,
                             threads, out_path, format);
    }
    if (app.got_subcommand(sim)) {
      return run_simulate(graph_path, lattice, model, start, steps, sim_n,
                          seed, threads, out_path, format);
    }
    if (app.got_subcommand(cc)) {
      return run_couple_check(graph_path, lattice, cc_wminus, cc_wplus,
                              x1_arg, cc_n, seed, threads, out_path, format);
    }
    if (app.got_subcommand(eff)) {
      return run_eff(graph_path, lattice, eff_x0, eff_delta, beta_samples,
                     seed, threads, out_path, format);
    }
    if (app.got_subcommand(co)) {
      return run_convex_order(graph_path, lattice, co_wminus, co_wplus, co_i,
                              x_arg, co_n, seed, threads, out_path, format);
    }
    if (app.got_subcommand(sc)) {
      return run_scan(scan_d, scan_side, weights_arg, scan_x0, scan_n, seed,
                      threads, out_path, format);
    }
    if (app.got_subcommand(su)) {
      return run_suite_cmd(config_path, print_default, seed,
                           seed_opt->count() > 0, threads,
                           threads_opt->count() > 0, out_path, format);
    }
  } catch (const vrjplab::Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
