// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "anderson/harness.hpp"

namespace anderson {
namespace {

struct Values {
  int dim = 1;
  int sites = 100;
  std::string dist;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
  std::string config;
  double center = 0.0;
  double halfwidth = 0.0;
  std::string eta;
  std::string interval;
  double q = 0.0;
  double beta = 0.0;
  double c = 0.0;
  std::string schedule;
  int kmin = 0;
  int kmax = 0;
  int host_sites = 0;
  std::string mode;
};

struct Command {
  ExperimentKind kind;
  CLI::App* app = nullptr;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> required;

  bool given(const std::string& name) const {
    auto it = options.find(name);
    return it != options.end() && it->second->count() > 0;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_number(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ConfigError(flag + ": '" + text + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number(p, flag));
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag);
  if (v.size() != 2) throw ConfigError(flag + " expects lo,hi");
  return {v[0], v[1]};
}

std::pair<double, double> parse_dist(const std::string& text) {
  const std::string prefix = "uniform:";
  if (text.rfind(prefix, 0) != 0) throw ConfigError("--dist expects uniform:a,b");
  return parse_pair(text.substr(prefix.size()), "--dist");
}

Command add_command(CLI::App& root, Values& v, ExperimentKind kind, const std::string& name,
                    const std::string& description) {
  Command c{kind, root.add_subcommand(name, description), {}, {}};
  CLI::App& a = *c.app;
  c.options["dim"] = a.add_option("--dim", v.dim, "lattice dimension d");
  c.options["sites"] = a.add_option("--sites", v.sites, "sites per side n");
  c.options["dist"] = a.add_option("--dist", v.dist, "potential law, uniform:a,b");
  c.options["samples"] = a.add_option("--samples", v.samples, "number of trials");
  c.options["seed"] = a.add_option("--seed", v.seed, "master seed");
  c.options["out"] = a.add_option("--out", v.out, "output path (JSONL or CSV)");
  c.options["workers"] = a.add_option("--workers", v.workers, "worker threads (advisory)");
  c.options["config"] = a.add_option("--config", v.config, "JSON config file; flags override it");

  switch (kind) {
    case ExperimentKind::minami:
    case ExperimentKind::factorial_moment:
    case ExperimentKind::chain:
      c.options["center"] = a.add_option("--center", v.center, "center E of J");
      c.options["halfwidth"] = a.add_option("--halfwidth", v.halfwidth, "half-width of J");
      c.required = {"halfwidth"};
      if (kind == ExperimentKind::chain)
        c.options["eta"] = a.add_option("--eta", v.eta, "comma-separated eta grid");
      break;
    case ExperimentKind::lemma2:
    case ExperimentKind::covering:
      c.options["interval"] = a.add_option("--interval", v.interval, "I as lo,hi");
      c.options["q"] = a.add_option("--q", v.q, "threshold exponent q");
      c.required = {"interval", "q"};
      break;
    case ExperimentKind::gaps:
      c.options["interval"] = a.add_option("--interval", v.interval, "I as lo,hi");
      break;
    case ExperimentKind::lemma1:
      c.options["beta"] = a.add_option("--beta", v.beta, "decay exponent beta");
      c.options["c"] = a.add_option("--c", v.c, "decay constant C (default: certified)");
      c.options["schedule"] = a.add_option("--schedule", v.schedule, "box sizes L1,L2,...");
      c.options["center"] = a.add_option("--center", v.center, "energy E (synthetic) or target");
      c.options["host-sites"] = a.add_option("--host-sites", v.host_sites, "host box sites");
      c.options["mode"] = a.add_option("--mode", v.mode, "synthetic or anderson");
      c.required = {"beta"};
      break;
    case ExperimentKind::incompat:
      c.options["beta"] = a.add_option("--beta", v.beta, "decay exponent beta");
      c.options["q"] = a.add_option("--q", v.q, "threshold exponent q");
      c.options["kmax"] = a.add_option("--kmax", v.kmax, "largest scale index");
      c.options["kmin"] = a.add_option("--kmin", v.kmin, "smallest scale index");
      c.options["c"] = a.add_option("--c", v.c, "width constant C");
      c.options["interval"] = a.add_option("--interval", v.interval, "I as lo,hi");
      c.required = {"beta", "q", "kmax"};
      break;
    case ExperimentKind::solver_validate:
      break;
  }
  return c;
}

EnsembleConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

EnsembleConfig build_config(const Command& c, const Values& v) {
  EnsembleConfig cfg;
  if (c.given("config")) {
    cfg = read_config_file(v.config);
  } else {
    for (const auto& name : c.required)
      if (!c.given(name)) throw CLI::RequiredError("--" + name);
    if (c.kind == ExperimentKind::incompat) cfg.samples = 0;
  }
  cfg.kind = c.kind;
  if (c.given("dim")) cfg.dimension = v.dim;
  if (c.given("sites")) cfg.sites = v.sites;
  if (c.given("dist")) std::tie(cfg.potential_lower, cfg.potential_upper) = parse_dist(v.dist);
  if (c.given("samples")) cfg.samples = v.samples;
  if (c.given("seed")) cfg.seed = v.seed;
  if (c.given("out")) cfg.output = v.out;
  if (c.given("workers")) cfg.workers = v.workers;
  if (c.given("center")) cfg.center = v.center;
  if (c.given("halfwidth")) cfg.half_width = v.halfwidth;
  if (c.given("eta")) cfg.eta_grid = parse_list(v.eta, "--eta");
  if (c.given("interval")) cfg.interval = parse_pair(v.interval, "--interval");
  if (c.given("q")) cfg.q = v.q;
  if (c.given("beta")) cfg.beta = v.beta;
  if (c.given("c")) cfg.constant = v.c;
  if (c.given("schedule")) {
    cfg.schedule.clear();
    for (double x : parse_list(v.schedule, "--schedule")) {
      if (x != static_cast<int>(x)) throw ConfigError("--schedule entries must be integers");
      cfg.schedule.push_back(static_cast<int>(x));
    }
    if (!c.given("host-sites") && !c.given("config"))
      cfg.host_sites = std::max(cfg.host_sites, 2 * cfg.schedule.back() - 1);
  }
  if (c.given("host-sites")) cfg.host_sites = v.host_sites;
  if (c.given("mode")) cfg.lemma1_mode = v.mode;
  if (c.given("kmin")) cfg.k_min = v.kmin;
  if (c.given("kmax")) cfg.k_max = v.kmax;
  return cfg;
}

void report_statistics(const Json& summary, std::ostream& out) {
  for (const auto& s : summary.at("statistics")) {
    out << "  " << s.at("name").get<std::string>() << ": " << fmt(s.at("empirical").get<double>())
        << " [" << fmt(s.at("ci_low").get<double>()) << ", "
        << fmt(s.at("ci_high").get<double>()) << "]";
    if (!s.at("bound").is_null()) out << " bound " << fmt(s.at("bound").get<double>());
    out << (s.at("violated").get<bool>() ? "  VIOLATED" : "  ok") << '\n';
  }
}

void report(const EnsembleConfig& cfg, const ExperimentResult& r, std::ostream& out) {
  const Json& s = r.summary;
  switch (cfg.kind) {
    case ExperimentKind::covering:
      out << "count " << s.at("count").get<std::uint64_t>() << " vs bound "
          << fmt(s.at("paper_bound").get<double>())
          << (s.at("passes_paper_bound").get<bool>() ? "  ok" : "  EXCEEDS") << '\n'
          << "probes " << s.at("probes").get<std::uint64_t>() << ", uncovered "
          << s.at("probe_failures").get<std::uint64_t>() << '\n';
      break;
    case ExperimentKind::solver_validate:
      out << "path-spectrum max error " << fmt(s.at("max_eigenvalue_error").get<double>())
          << ", residual " << fmt(s.at("max_residual").get<double>()) << ", orthogonality "
          << fmt(s.at("max_orthogonality_defect").get<double>()) << ", trace "
          << fmt(s.at("trace_defect").get<double>())
          << (r.violated ? "  FAIL" : "  pass") << '\n';
      break;
    case ExperimentKind::lemma1:
      if (cfg.output.empty()) out << r.table_csv;
      out << "constant " << fmt(s.at("constant").get<double>()) << " ("
          << s.at("constant_source").get<std::string>() << "), threshold L ";
      if (s.at("threshold_L").is_null())
        out << "none";
      else
        out << s.at("threshold_L").get<int>();
      out << ", contradictions " << s.at("contradictions").get<std::size_t>() << '\n';
      break;
    case ExperimentKind::incompat:
      if (cfg.output.empty()) out << r.table_csv;
      break;
    default:
      out << to_string(cfg.kind) << ": " << cfg.samples << " trials\n";
      report_statistics(s, out);
      break;
  }
  if (!cfg.output.empty()) {
    if (is_ensemble(cfg.kind) || !r.table_csv.empty()) out << "wrote " << cfg.output << '\n';
    out << "wrote " << summary_path(cfg.output) << '\n';
  }
  out << "violated: " << (r.violated ? "true" : "false") << '\n';
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for two-eigenvalue estimates of Anderson Hamiltonians",
               "anderson-lab"};
  app.require_subcommand(1);
  Values v;
  std::vector<Command> commands;
  commands.push_back(add_command(app, v, ExperimentKind::minami, "minami",
                                 "P(N_J >= 2) against the two-eigenvalue bound"));
  commands.push_back(add_command(app, v, ExperimentKind::factorial_moment, "moment",
                                 "E[N_J (N_J - 1)] against the two-eigenvalue bound"));
  commands.push_back(add_command(app, v, ExperimentKind::chain, "chain",
                                 "resolvent chain of majorants, per eta"));
  commands.push_back(add_command(app, v, ExperimentKind::lemma2, "lemma2",
                                 "frequency of small gaps in I against its bound"));
  commands.push_back(add_command(app, v, ExperimentKind::lemma1, "lemma1",
                                 "degenerate-pair projection experiment over a box schedule"));
  commands.push_back(add_command(app, v, ExperimentKind::gaps, "gaps",
                                 "minimum eigenvalue gaps in I"));
  commands.push_back(add_command(app, v, ExperimentKind::covering, "covering",
                                 "cover of I by tiles of length 2 n^-q"));
  commands.push_back(add_command(app, v, ExperimentKind::incompat, "incompat",
                                 "interval width against the gap threshold across scales"));
  commands.push_back(add_command(app, v, ExperimentKind::solver_validate, "solver-validate",
                                 "eigensolver against the free Laplacian spectrum"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();

  const Command* chosen = nullptr;
  try {
    app.parse(reversed);
    for (const auto& c : commands)
      if (c.app->parsed()) chosen = &c;
    EnsembleConfig cfg = build_config(*chosen, v);
    cfg.validate();
    const ExperimentResult result = run_experiment(cfg);
    report(cfg, result, out);
    return result.violated ? kExitViolated : kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << (chosen ? chosen->app->help() : app.help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* scope = &app;
    for (const auto& c : commands)
      if (c.app->parsed()) scope = c.app;
    err << "error: " << e.what() << "\n\n" << scope->help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << (chosen ? chosen->app->help() : app.help());
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cli_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace anderson
