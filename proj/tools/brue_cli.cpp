// Command-line front end: load a network, run the solvers, and emit CSV or
// JSON for scripts and plotting tools.  Exit codes: 0 success, 1 internal
// error, 2 input error, 3 non-convergence, 4 failed reproduction check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <brue/brue.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitCheckFailed = 4;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All numbers leave the program through here: 12 significant digits, plain C
// locale, so identical configs produce byte-identical output.
std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double snap(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

struct Sink {
  std::ofstream file;
  std::ostream* out = &std::cout;

  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw InputError("cannot open output file: " + path);
    out = &file;
  }
  std::ostream& stream() { return *out; }
};

std::vector<double> parse_grid(const std::string& spec) {
  double a = 0.0, b = 0.0, step = 0.0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3)
    throw InputError("--eps-grid expects a:b:step");
  if (!(step > 0.0) || b < a) throw InputError("--eps-grid needs step > 0 and b >= a");
  std::vector<double> grid;
  for (double e = a; e <= b + 1e-12; e += step) grid.push_back(std::min(e, b));
  return grid;
}

std::vector<double> parse_prior(const std::string& spec, int states) {
  std::vector<double> p;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string tok = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      p.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InputError("--prior expects a number or comma-separated list");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  // a single value means Pr[state 1] on two-state networks
  if (p.size() == 1 && states == 2) p = {1.0 - p[0], p[0]};
  if (static_cast<int>(p.size()) != states)
    throw InputError("--prior has " + std::to_string(p.size()) + " entries but the network has " +
                     std::to_string(states) + " states");
  return p;
}

brue::json load_input(const std::string& path) {
  try {
    return brue::read_json_file(path);
  } catch (const brue::ParseError& e) {
    throw InputError(e.what());
  }
}

// ---------------------------------------------------------------- ue -------

int cmd_ue(const std::string& input, double tol, std::uint64_t seed, const std::string& format,
           Sink& sink) {
  const brue::json j = load_input(input);
  if (brue::looks_stochastic(j))
    throw InputError("ue expects a deterministic network; stochastic inputs go through signal");
  const brue::Network net = brue::network_from_json(j);

  brue::UESolveOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  const brue::UESolution sol = brue::solve_ue(net, opts);
  const auto costs = brue::edge_costs(net, sol.edge_flows);

  std::ostream& os = sink.stream();
  if (format == "json") {
    brue::json out;
    out["psi0"] = snap(sol.psi0);
    out["phi0"] = snap(sol.phi0);
    out["relative_gap"] = snap(sol.relative_gap);
    out["iterations"] = sol.iterations;
    brue::json edges = brue::json::array();
    for (int e = 0; e < net.edge_count(); ++e)
      edges.push_back({{"id", net.edge(e).id},
                       {"flow", snap(sol.edge_flows[static_cast<std::size_t>(e)])},
                       {"cost", snap(costs[static_cast<std::size_t>(e)])}});
    out["edges"] = std::move(edges);
    os << out.dump(2) << "\n";
  } else {
    os << "quantity,value\n";
    os << "psi0," << fmt(sol.psi0) << "\n";
    os << "phi0," << fmt(sol.phi0) << "\n";
    os << "relative_gap," << fmt(sol.relative_gap) << "\n";
    os << "iterations," << sol.iterations << "\n";
    for (int e = 0; e < net.edge_count(); ++e)
      os << "flow[" << net.edge(e).id << "]," << fmt(sol.edge_flows[static_cast<std::size_t>(e)])
         << "\n";
    for (int e = 0; e < net.edge_count(); ++e)
      os << "cost[" << net.edge(e).id << "]," << fmt(costs[static_cast<std::size_t>(e)]) << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- worst -------

int cmd_worst(const std::string& input, double eps, const std::string& eps_grid,
              std::uint64_t seed, const std::string& format, Sink& sink) {
  const brue::json j = load_input(input);
  if (brue::looks_stochastic(j))
    throw InputError("worst expects a deterministic network; stochastic inputs go through signal");
  const brue::Network net = brue::network_from_json(j);
  const brue::PathSet paths = brue::enumerate_paths(net);

  brue::WorstBrueOptions opts;
  opts.seed = seed;
  std::ostream& os = sink.stream();

  if (!eps_grid.empty()) {
    const std::vector<double> grid = parse_grid(eps_grid);
    const auto curve = brue::psi_eps_curve(net, paths, grid, opts);
    if (format == "json") {
      brue::json rows = brue::json::array();
      for (const auto& [e, psi] : curve) rows.push_back({{"eps", snap(e)}, {"psi_eps", snap(psi)}});
      os << brue::json{{"curve", std::move(rows)}}.dump(2) << "\n";
    } else {
      os << "eps,psi_eps\n";
      for (const auto& [e, psi] : curve) os << fmt(e) << "," << fmt(psi) << "\n";
    }
    return kExitOk;
  }

  if (eps < 0.0) throw InputError("worst needs --eps or --eps-grid");
  const brue::WorstBrueResult res = brue::worst_brue(net, paths, eps, opts);
  if (format == "json") {
    brue::json witness = brue::json::array();
    for (int p = 0; p < paths.count(); ++p) witness.push_back(snap(res.witness[p]));
    os << brue::json{{"eps", snap(eps)},
                     {"psi_eps", snap(res.psi_eps)},
                     {"witness", std::move(witness)},
                     {"certified", res.certified}}
              .dump(2)
       << "\n";
  } else {
    os << "quantity,value\n";
    os << "eps," << fmt(eps) << "\n";
    os << "psi_eps," << fmt(res.psi_eps) << "\n";
    for (int p = 0; p < paths.count(); ++p)
      os << "witness[" << p << "]," << fmt(res.witness[p]) << "\n";
    os << "certified," << (res.certified ? 1 : 0) << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------ signal -------

int cmd_signal(const std::string& input, double eps, const std::string& prior, int grid_size,
               std::uint64_t seed, bool best_effort, const std::string& format, Sink& sink) {
  const brue::json j = load_input(input);
  if (!brue::looks_stochastic(j))
    throw InputError("signal expects a stochastic network (a file with a states array)");
  brue::StochasticNetwork snet = brue::stochastic_from_json(j);
  if (!prior.empty())
    snet = brue::StochasticNetwork(snet.base(), snet.states(),
                                   parse_prior(prior, snet.state_count()));
  if (eps < 0.0) throw InputError("signal needs --eps");
  if (grid_size < 3) throw InputError("--grid-size must be at least 3");

  brue::DesignOptions opts;
  opts.grid_size = grid_size;
  opts.seed = seed;
  opts.best_effort = best_effort;
  const brue::SignalDesign design = brue::design_signal(snet, eps, opts);
  const auto& scheme = design.scheme;

  std::ostream& os = sink.stream();
  if (format == "csv") {
    // belief sweep for plotting: worst-case value and its lower convex envelope
    if (snet.state_count() != 2)
      throw InputError("csv output needs a two-state network; use --format json");
    std::vector<double> mus(static_cast<std::size_t>(grid_size)), values(mus.size());
    for (int i = 0; i < grid_size; ++i) {
      mus[static_cast<std::size_t>(i)] = static_cast<double>(i) / (grid_size - 1);
      values[static_cast<std::size_t>(i)] = brue::psi_eps_at_belief(
          snet, brue::Belief::binary(mus[static_cast<std::size_t>(i)]), eps, opts.worst);
    }
    const std::vector<int> hull = brue::detail::lower_hull(mus, values);
    os << "mu,psi_eps_mu,envelope\n";
    std::size_t seg = 0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
      while (seg + 2 < hull.size() && mus[static_cast<std::size_t>(hull[seg + 1])] <= mus[i])
        ++seg;
      const double x0 = mus[static_cast<std::size_t>(hull[seg])];
      const double x1 = mus[static_cast<std::size_t>(hull[seg + 1])];
      const double y0 = values[static_cast<std::size_t>(hull[seg])];
      const double y1 = values[static_cast<std::size_t>(hull[seg + 1])];
      const double t = x1 > x0 ? (mus[i] - x0) / (x1 - x0) : 0.0;
      os << fmt(mus[i]) << "," << fmt(values[i]) << "," << fmt(y0 + t * (y1 - y0)) << "\n";
    }
    return kExitOk;
  }

  brue::json posteriors = brue::json::array();
  for (const brue::Belief& b : scheme.posteriors()) {
    brue::json q = brue::json::array();
    for (double v : b.probs()) q.push_back(snap(v));
    posteriors.push_back(std::move(q));
  }
  brue::json weights = brue::json::array();
  for (double w : scheme.weights()) weights.push_back(snap(w));
  // conditional signal matrix: row per message, column per state
  brue::json conditional = brue::json::array();
  for (std::size_t m = 0; m < scheme.posteriors().size(); ++m) {
    brue::json row = brue::json::array();
    for (int w = 0; w < snet.state_count(); ++w) {
      const double nu = snet.prior()[static_cast<std::size_t>(w)];
      const double q = scheme.posteriors()[m].probs()[static_cast<std::size_t>(w)];
      row.push_back(nu > 0.0 ? snap(scheme.weights()[m] * q / nu) : 0.0);
    }
    conditional.push_back(std::move(row));
  }
  brue::json prior_json = brue::json::array();
  for (double v : snet.prior()) prior_json.push_back(snap(v));
  os << brue::json{{"eps", snap(eps)},
                   {"prior", std::move(prior_json)},
                   {"expected_cost", snap(design.expected_cost)},
                   {"approximate", design.approximate},
                   {"no_revelation", scheme.is_no_revelation()},
                   {"full_revelation", scheme.is_full_revelation()},
                   {"posteriors", std::move(posteriors)},
                   {"weights", std::move(weights)},
                   {"conditional", std::move(conditional)}}
            .dump(2)
     << "\n";
  return kExitOk;
}

// --------------------------------------------------------- reproduce -------

int cmd_reproduce(const std::string& target, std::uint64_t seed, const std::string& format,
                  Sink& sink) {
  std::vector<brue::CheckGroup> groups;
  if (target == "wheatstone") {
    groups = {brue::check_wheatstone_equilibrium(), brue::check_wheatstone_extras()};
  } else if (target == "chain") {
    groups = {brue::check_chain_inefficiency(), brue::check_chain_extras()};
  } else if (target == "n1") {
    groups = {brue::check_n1_design_regimes(), brue::check_n1_value_formula(),
              brue::check_n1_extras()};
  } else if (target == "n2") {
    groups = {brue::check_n2_revelation_window(), brue::check_n2_extras()};
  } else if (target == "bounds") {
    groups = {brue::check_two_road_worst_case(), brue::check_large_eps_no_revelation(),
              brue::check_flow_properties(seed)};
  } else if (target == "all") {
    groups = brue::acceptance_checks(seed);
    groups.push_back(brue::check_wheatstone_extras());
    groups.push_back(brue::check_chain_extras());
    groups.push_back(brue::check_n1_extras());
    groups.push_back(brue::check_n2_extras());
  } else {
    throw InputError("unknown reproduce target: " + target +
                     " (expected wheatstone, chain, n1, n2, bounds, or all)");
  }

  bool all_pass = true;
  std::ostream& os = sink.stream();
  if (format == "json") {
    brue::json rows = brue::json::array();
    for (const brue::CheckGroup& g : groups)
      for (const brue::CheckRow& r : g.rows) {
        all_pass = all_pass && r.pass;
        rows.push_back({{"group", g.name},
                        {"check", r.name},
                        {"observed", snap(r.observed)},
                        {"expected", snap(r.expected)},
                        {"tol", snap(r.tol)},
                        {"status", r.pass ? "PASS" : "FAIL"}});
      }
    os << rows.dump(2) << "\n";
  } else {
    os << "group,check,observed,expected,tol,status\n";
    for (const brue::CheckGroup& g : groups)
      for (const brue::CheckRow& r : g.rows) {
        all_pass = all_pass && r.pass;
        os << g.name << "," << r.name << "," << fmt(r.observed) << "," << fmt(r.expected) << ","
           << fmt(r.tol) << "," << (r.pass ? "PASS" : "FAIL") << "\n";
      }
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

// -------------------------------------------------------------- make -------

int cmd_make(const std::string& dir, Sink& sink) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir + ": " + ec.message());
  const auto emit = [&](const std::string& name, const brue::json& j) {
    const std::string path = dir + "/" + name;
    brue::write_json_file(path, j);
    sink.stream() << "wrote " << path << "\n";
  };
  emit("wheatstone.json", brue::network_to_json(brue::make_wheatstone()));
  emit("tworoad.json", brue::network_to_json(
                           brue::make_two_road(brue::CostPolynomial({1.0}),
                                               brue::CostPolynomial({2.0}))));
  emit("chain.json", brue::network_to_json(brue::make_wheatstone_chain(4, 1e-3)));
  emit("n1.json", brue::stochastic_to_json(brue::make_n1()));
  emit("n2.json", brue::stochastic_to_json(brue::make_n2()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon-BRUE congestion game analysis"};
  app.require_subcommand(1);

  std::string input, output, format = "csv", eps_grid, prior, target, make_dir = "data";
  double eps = -1.0, tol = 1e-10;
  std::uint64_t seed = 0;
  int grid_size = 2001;
  bool best_effort = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed (default 0)");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", output, "write to this file instead of stdout");
  };

  CLI::App* ue = app.add_subcommand("ue", "solve the user equilibrium");
  ue->add_option("input", input, "network JSON file")->required();
  ue->add_option("--tol", tol, "relative duality gap target");
  add_common(ue);

  CLI::App* worst = app.add_subcommand("worst", "worst-case social cost of eps-indifferent flows");
  worst->add_option("input", input, "network JSON file")->required();
  worst->add_option("--eps", eps, "indifference threshold");
  worst->add_option("--eps-grid", eps_grid, "a:b:step sweep; emits one row per eps");
  add_common(worst);

  CLI::App* signal = app.add_subcommand("signal", "design the optimal public signal");
  signal->add_option("input", input, "stochastic network JSON file")->required();
  signal->add_option("--eps", eps, "indifference threshold")->required();
  signal->add_option("--prior", prior, "override the prior (single Pr[state 1] or comma list)");
  signal->add_option("--grid-size", grid_size, "belief grid resolution");
  signal->add_flag("--best-effort", best_effort, "sampling fallback beyond two states");
  add_common(signal);

  CLI::App* reproduce = app.add_subcommand("reproduce", "re-run the pinned reference checks");
  reproduce->add_option("target", target, "wheatstone, chain, n1, n2, bounds, or all")
      ->required();
  add_common(reproduce);

  CLI::App* make = app.add_subcommand("make", "write the bundled example networks");
  make->add_option("dir", make_dir, "output directory (default data)");
  make->add_option("--output", output, "write the file list to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    Sink sink(output);
    if (ue->parsed()) return cmd_ue(input, tol, seed, format, sink);
    if (worst->parsed()) return cmd_worst(input, eps, eps_grid, seed, format, sink);
    if (signal->parsed())
      return cmd_signal(input, eps, prior, grid_size, seed, best_effort, format, sink);
    if (reproduce->parsed()) return cmd_reproduce(target, seed, format, sink);
    if (make->parsed()) return cmd_make(make_dir, sink);
    return kExitInternal;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const brue::NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const brue::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const brue::InvalidNetwork& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const brue::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
