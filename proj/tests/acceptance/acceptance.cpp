// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here and are not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "anderson/eigensolver.hpp"
#include "anderson/harness.hpp"
#include "anderson/lemma_one.hpp"
#include "anderson/minami.hpp"
#include "anderson/spectral_stats.hpp"
#include "oracles/free_spectrum.hpp"

namespace {

using namespace anderson;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "anderson_lab_acceptance";
  fs::create_directories(dir);
  return dir;
}

const BoundComparison stat(const ExperimentResult& r, std::size_t k) {
  const Json& s = r.summary.at("statistics").at(k);
  BoundComparison c;
  c.name = s.at("name").get<std::string>();
  c.empirical = s.at("empirical").get<double>();
  c.ci_low = s.at("ci_low").get<double>();
  c.ci_high = s.at("ci_high").get<double>();
  if (!s.at("bound").is_null()) c.bound = s.at("bound").get<double>();
  c.violated = s.at("violated").get<bool>();
  return c;
}

std::string describe(const BoundComparison& c) {
  std::string s = c.name + " = " + fmt(c.empirical) + " [" + fmt(c.ci_low) + ", " +
                  fmt(c.ci_high) + "]";
  if (c.bound) s += " vs bound " + fmt(*c.bound);
  return s;
}

// Acceptance commands, shared by the criteria and by the determinism re-runs.
EnsembleConfig minami_cmd(double half_width) {
  EnsembleConfig c;
  c.kind = ExperimentKind::minami;
  c.dimension = 1;
  c.sites = 100;
  c.center = 0.0;
  c.half_width = half_width;
  c.samples = 10000;
  c.seed = 42;
  return c;
}

EnsembleConfig chain_cmd() {
  EnsembleConfig c;
  c.kind = ExperimentKind::chain;
  c.sites = 50;
  c.center = 0.0;
  c.half_width = 0.1;
  c.eta_grid = {0.1, 1.0, 0.01};
  c.samples = 10000;
  c.seed = 42;
  return c;
}

EnsembleConfig lemma2_cmd() {
  EnsembleConfig c;
  c.kind = ExperimentKind::lemma2;
  c.sites = 64;
  c.q = 2.5;
  c.interval = std::pair{-1.0, 1.0};
  c.samples = 10000;
  c.seed = 42;
  return c;
}

EnsembleConfig gaps_cmd(int d, int n) {
  EnsembleConfig c;
  c.kind = ExperimentKind::gaps;
  c.dimension = d;
  c.sites = n;
  c.samples = 1000;
  c.seed = 42;
  return c;
}

EnsembleConfig lemma1_cmd() {
  EnsembleConfig c;
  c.kind = ExperimentKind::lemma1;
  c.beta = 3.0;
  c.schedule = {25, 51, 101, 201};
  c.host_sites = 401;
  c.seed = 42;
  return c;
}

Outcome solver_exactness() {
  Outcome o;
  const auto start = Clock::now();
  for (int n : {3, 10, 100, 500}) {
    const BoxGeometry g(1, n);
    const auto h = build_hamiltonian(g, std::vector<double>(g.volume(), 0.0));
    const auto dec = symmetric_eigen(h);
    const auto ref = oracle::path_spectrum(n);
    double err = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) err = std::max(err, std::abs(dec.eigenvalues[k] - ref[k]));
    const auto rep = residual_report(h, dec);
    const double tol = 1e-10 * (1.0 + h.frobenius_norm());
    o.require(err <= 1e-10, "n=" + std::to_string(n) + " max |lambda - (-2cos)| = " + fmt(err));
    o.require(rep.max_residual <= tol,
              "n=" + std::to_string(n) + " residual " + fmt(rep.max_residual) + " <= " + fmt(tol));
  }
  const double t = seconds_since(start);
  o.require(t < 30.0, "runtime " + fmt(t) + " s < 30 s");
  return o;
}

// Criteria 2 and 3 share their samples.
struct ChainSamples {
  double max_rel_defect = 0.0;
  double min_summand = INFINITY;
  std::size_t pair_violations = 0;
  std::size_t checked = 0;
};

ChainSamples per_sample_chain() {
  ChainSamples s;
  const BoxGeometry g(1, 50);
  const auto spec = PotentialSpec::uniform(-2.0, 2.0);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto dec = symmetric_eigen(sample_hamiltonian(g, spec, 42, i));
    for (double eta : {1.0, 0.1, 0.01}) {
      const auto rep = chain_report(dec, Interval::centered(0.0, eta));
      const double rel = std::abs(rep.trace_form - rep.determinant_form) /
                         std::max(std::abs(rep.trace_form), 1e-300);
      s.max_rel_defect = std::max(s.max_rel_defect, rel);
      s.min_summand = std::min(s.min_summand, rep.min_det2_summand);
      if (!(static_cast<double>(rep.factorial_moment) <= rep.resolvent_pair_sum)) ++s.pair_violations;
      ++s.checked;
    }
  }
  return s;
}

Outcome appendix_identity(const ChainSamples& s) {
  Outcome o;
  o.require(s.max_rel_defect <= 1e-8,
            "max relative |trace form - determinant form| = " + fmt(s.max_rel_defect) +
                " over " + std::to_string(s.checked) + " (sample, eta) pairs");
  o.require(s.min_summand >= -1e-12, "min det2 summand = " + fmt(s.min_summand));
  return o;
}

Outcome pointwise_chain(const ChainSamples& s) {
  Outcome o;
  o.require(s.pair_violations == 0, "N(N-1) > pair sum in " + std::to_string(s.pair_violations) +
                                        " of " + std::to_string(s.checked) + " (sample, eta) pairs");
  return o;
}

Outcome minami_bound_check() {
  Outcome o;
  const auto start = Clock::now();
  const auto main = run_experiment(minami_cmd(0.01));
  const double bound = kPi2 / 16.0 * 0.02 * 0.02 * 100.0 * 100.0;
  const auto p = stat(main, 0), m = stat(main, 1);
  o.require(std::abs(*p.bound - bound) <= 1e-12 * bound, "bound = " + fmt(*p.bound));
  o.require(p.ci_high <= bound, describe(p));
  o.require(m.ci_high <= bound, describe(m));

  // |J| = 0.02, 0.01, 0.005, for both statistics.
  std::vector<ExperimentResult> sweep;
  sweep.push_back(main);
  for (double hw : {0.005, 0.0025}) sweep.push_back(run_experiment(minami_cmd(hw)));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t s = 0; s + 1 < sweep.size(); ++s) {
      const auto wide = stat(sweep[s], k), narrow = stat(sweep[s + 1], k);
      o.require(narrow.ci_low <= wide.ci_high / 4.0,
                wide.name + ": |J| halved " + fmt(wide.empirical) + " -> " + fmt(narrow.empirical) +
                    ", need ci_low " + fmt(narrow.ci_low) + " <= ci_high/4 " +
                    fmt(wide.ci_high / 4.0));
    }
  const double t = seconds_since(start);
  o.require(t < 300.0, "runtime " + fmt(t) + " s < 300 s");
  return o;
}

Outcome site_pair_check() {
  Outcome o;
  const auto r = run_experiment(chain_cmd());
  const double bound = kPi2 / 16.0;
  // statistics: ceilings (one per eta), then per eta: site pair, ...
  const std::size_t etas = 3, per_eta = 6;
  for (std::size_t e = 0; e < etas; ++e) {
    const auto pair = stat(r, etas + e * per_eta);
    o.require(pair.ci_high <= bound && std::abs(*pair.bound - bound) < 1e-15, describe(pair));
  }
  o.require(!r.violated, "no statistic of the chain run violated");
  return o;
}

Outcome lemma2_check() {
  Outcome o;
  const auto r = run_experiment(lemma2_cmd());
  const auto freq = stat(r, 0), audit = stat(r, 1);
  const double bound = 8.0 * kPi2 / 16.0 * 3.0 * std::pow(64.0, -0.5);
  o.require(std::abs(*freq.bound - bound) <= 1e-12 * bound, "bound = " + fmt(bound));
  o.require(freq.ci_high <= bound, describe(freq));
  o.require(audit.empirical == 0.0 && audit.name.find("of 100") != std::string::npos,
            describe(audit));
  return o;
}

Outcome covering_check() {
  Outcome o;
  std::size_t cases = 0, count_mismatch = 0, over_bound = 0, probe_failures = 0;
  for (double len : {0.1, 1.0, 2.0})
    for (double q : {2.1, 2.5, 3.0})
      for (int n = 2; n <= 64; ++n) {
        const Interval i(-len / 2.0, len / 2.0);
        const auto r = covering_count(i, q, n);
        const long double nq = std::pow(static_cast<long double>(n), static_cast<long double>(q));
        const auto expect = 2 * (static_cast<std::uint64_t>(std::floor(nq / 2.0L * len)) + 1);
        ++cases;
        if (r.count != expect) ++count_mismatch;
        if (!(static_cast<double>(r.count) <= std::pow(n, q) * len + 2.0)) ++over_bound;
        probe_failures += r.probe_failures;
      }
  o.require(count_mismatch == 0, std::to_string(count_mismatch) + " count mismatches in " +
                                     std::to_string(cases) + " cases");
  o.require(over_bound == 0, std::to_string(over_bound) + " counts above n^q |I| + 2");
  o.require(probe_failures == 0, std::to_string(probe_failures) + " uncovered probes");
  return o;
}

Outcome lemma1_check() {
  Outcome o;
  const auto r = run_experiment(lemma1_cmd());
  const Json& s = r.summary;
  o.require(s.at("constant_source") == "certified",
            "C = " + fmt(s.at("constant").get<double>()) + " from decay certificates");
  std::optional<int> threshold;
  if (!s.at("threshold_L").is_null()) threshold = s.at("threshold_L").get<int>();
  o.require(threshold.has_value(), "threshold L = " + (threshold ? std::to_string(*threshold) : "none"));
  std::vector<double> logl, logd;
  for (const auto& row : s.at("rows")) {
    const int l = row.at("L").get<int>();
    const auto& f = row.at("flags");
    const std::string tag = "L=" + std::to_string(l);
    o.require(f.at("eq1").get<bool>() && f.at("eq2").get<bool>() && f.at("eq4").get<bool>(),
              tag + " flags eq1 eq2 eq4");
    if (threshold && l >= *threshold) {
      o.require(row.at("q_ratio_max").get<double>() <= 2.0 / 3.0,
                tag + " ||Q psi||/||psi|| = " + fmt(row.at("q_ratio_max").get<double>()));
      o.require(row.at("count").get<int>() >= 2,
                tag + " count in 3eps window = " + std::to_string(row.at("count").get<int>()));
    }
    logl.push_back(std::log(static_cast<double>(l)));
    logd.push_back(std::log(row.at("span_defect").get<double>()));
  }
  const double n = static_cast<double>(logl.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < logl.size(); ++k) mx += logl[k] / n, my += logd[k] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < logl.size(); ++k) {
    sxy += (logl[k] - mx) * (logd[k] - my);
    sxx += (logl[k] - mx) * (logl[k] - mx);
  }
  const double slope = sxy / sxx;
  o.require(std::abs(slope - (-3.0 + 0.5)) <= 0.5,
            "log-log slope of span defect = " + fmt(slope) + ", target -2.5 +- 0.5");
  return o;
}

Outcome simplicity_check() {
  Outcome o;
  for (auto [d, n] : {std::pair{1, 100}, {2, 12}}) {
    const auto r = run_experiment(gaps_cmd(d, n));
    const auto degenerate = stat(r, 0), smallest = stat(r, 1);
    o.require(degenerate.empirical == 0.0 && smallest.empirical > 1e-12,
              "d=" + std::to_string(d) + " n=" + std::to_string(n) + ": 1000 samples, smallest gap " +
                  fmt(smallest.empirical));
  }
  const BoxGeometry g(2, 12);
  const auto ev = symmetric_eigenvalues(build_hamiltonian(g, std::vector<double>(g.volume(), 0.0)));
  const double gap = *min_gap(ev, Interval(ev.front(), ev.back()));
  o.require(gap <= kDegeneracyTolerance,
            "d=2 n=12 V=0 control: min gap " + fmt(gap) + " (degenerate within 1e-12)");
  return o;
}

std::string file_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string stripped_jsonl(const fs::path& p) {
  std::ifstream in(p);
  std::string out;
  for (std::string line; std::getline(in, line);) out += deterministic_view(Json::parse(line)).dump() + "\n";
  return out;
}

Outcome determinism_check() {
  Outcome o;
  const fs::path dir = work_dir();
  std::vector<std::pair<std::string, EnsembleConfig>> commands = {
      {"minami", minami_cmd(0.01)}, {"chain", chain_cmd()},     {"lemma2", lemma2_cmd()},
      {"gaps-1d", gaps_cmd(1, 100)}, {"gaps-2d", gaps_cmd(2, 12)}, {"lemma1", lemma1_cmd()}};
  for (auto& [name, cfg] : commands) {
    std::string summaries[2], records[2];
    for (int k = 0; k < 2; ++k) {
      const unsigned workers = k == 0 ? 1u : 8u;
      cfg.output = (dir / (name + "-w" + std::to_string(workers) +
                           (is_ensemble(cfg.kind) ? ".jsonl" : ".csv"))).string();
      cfg.workers = workers;
      run_experiment(cfg);
      summaries[k] = deterministic_view(Json::parse(file_text(summary_path(cfg.output)))).dump(2);
      records[k] = is_ensemble(cfg.kind) ? stripped_jsonl(cfg.output) : file_text(cfg.output);
    }
    o.require(summaries[0] == summaries[1] && records[0] == records[1],
              name + ": summary and records identical at 1 and 8 workers (" +
                  std::to_string(summaries[0].size()) + " summary bytes)");
  }
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  ChainSamples chain_samples;
  bool chain_ready = false;
  auto chain = [&]() -> const ChainSamples& {
    if (!chain_ready) chain_samples = per_sample_chain(), chain_ready = true;
    return chain_samples;
  };
  const std::vector<Criterion> criteria = {
      {1, "solver exactness (d=1, V=0, n in {3,10,100,500})", solver_exactness},
      {2, "trace form equals determinant form, det2 >= -1e-12", [&] { return appendix_identity(chain()); }},
      {3, "pointwise N(N-1) <= resolvent pair sum", [&] { return pointwise_chain(chain()); }},
      {4, "two-eigenvalue bound, d=1 n=100, 1e4 samples, |J| sweep", minami_bound_check},
      {5, "per-pair det2 mean <= pi^2 rho^2, d=1 n=50, 1e4 samples", site_pair_check},
      {6, "small-gap event frequency, d=1 n=64 q=2.5, audit of 100", lemma2_check},
      {7, "covering count and probe grid", covering_check},
      {8, "degenerate-pair projection chain, host n=401, beta=3", lemma1_check},
      {9, "finite-volume simplicity with disorder, degenerate control", simplicity_check},
      {10, "determinism at 1 and 8 workers", determinism_check},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                seconds_since(t));
    for (const auto& d : o.details) std::printf("      %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), seconds_since(start));
  return failures == 0 ? 0 : 1;
}
