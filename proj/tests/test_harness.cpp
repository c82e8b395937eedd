// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anderson/harness.hpp"
#include "anderson/minami.hpp"
#include "anderson/parallel.hpp"
#include "anderson/random_streams.hpp"

namespace anderson {
namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "anderson_lab_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

EnsembleConfig minami_config(std::uint64_t samples) {
  EnsembleConfig c;
  c.kind = ExperimentKind::minami;
  c.sites = 30;
  c.half_width = 0.1;
  c.samples = samples;
  return c;
}

Json strip_lines(const std::vector<std::string>& lines) {
  Json out = Json::array();
  for (const auto& l : lines) out.push_back(deterministic_view(Json::parse(l)));
  return out;
}

TEST(ExperimentKind, NamesRoundTrip) {
  for (auto k : {ExperimentKind::minami, ExperimentKind::factorial_moment, ExperimentKind::chain,
                 ExperimentKind::lemma2, ExperimentKind::lemma1, ExperimentKind::gaps,
                 ExperimentKind::solver_validate, ExperimentKind::covering,
                 ExperimentKind::incompat})
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  EXPECT_EQ(parse_experiment_kind("moment"), ExperimentKind::factorial_moment);
  EXPECT_THROW(parse_experiment_kind("wegner"), ConfigError);
}

TEST(EnsembleConfig, JsonRoundTripIsIdentity) {
  const CounterStream s(3);
  std::uint64_t k = 0;
  for (int trial = 0; trial < 200; ++trial) {
    EnsembleConfig c;
    c.kind = static_cast<ExperimentKind>(trial % 9);
    c.dimension = 1 + static_cast<int>(s.bits(k++) % 3);
    c.sites = 1 + static_cast<int>(s.bits(k++) % 200);
    c.potential_lower = -10.0 * s.uniform(k++);
    c.potential_upper = c.potential_lower + 0.1 + s.uniform(k++);
    c.center = s.uniform(k++) - 0.5;
    c.half_width = s.uniform(k++);
    if (trial % 2) c.eta_grid = {s.uniform(k++), s.uniform(k++)};
    if (trial % 3) c.interval = std::pair{-s.uniform(k++), s.uniform(k++)};
    c.q = 2.0 + s.uniform(k++);
    c.beta = 3.0 + s.uniform(k++);
    if (trial % 4) c.constant = s.uniform(k++);
    c.schedule = {5, 9, 17 + trial};
    c.host_sites = 100 + trial;
    c.lemma1_mode = trial % 5 ? "synthetic" : "anderson";
    c.k_min = 1 + trial % 3;
    c.k_max = 5 + trial % 4;
    c.samples = s.bits(k++);
    c.seed = s.bits(k++);
    c.output = "out" + std::to_string(trial) + ".jsonl";
    c.workers = static_cast<unsigned>(trial % 9);
    const Json j = to_json(c);
    EXPECT_EQ(config_from_json(j), c);
    EXPECT_EQ(config_from_json(Json::parse(j.dump())), c) << j.dump();
  }
}

TEST(EnsembleConfig, RejectsUnknownAndMalformed) {
  Json j = to_json(EnsembleConfig{});
  j["halfwidth"] = 0.1;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(EnsembleConfig{});
  j["sites"] = "many";
  EXPECT_THROW(config_from_json(j), ConfigError);
  EXPECT_THROW(config_from_json(Json::array()), ConfigError);
}

TEST(EnsembleConfig, Validation) {
  EnsembleConfig c = minami_config(10);
  EXPECT_NO_THROW(c.validate());
  c.half_width = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = minami_config(0);
  EXPECT_THROW(c.validate(), ConfigError);
  c = minami_config(10);
  c.potential_lower = 1.0;
  c.potential_upper = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = minami_config(10);
  c.kind = ExperimentKind::lemma2;
  c.q = 2.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.kind = ExperimentKind::incompat;
  c.q = 2.25;
  c.beta = 2.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = minami_config(10);
  c.sites = 200;
  c.dimension = 2;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(TrialRecord, JsonRoundTripAndSchema) {
  const auto r = run_trial(minami_config(1), 3);
  const Json j = r.to_json();
  for (const char* key :
       {"trial_index", "seed", "count_in_J", "min_gap_in_I", "factorial_moment", "elapsed_ms"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), derive_seed(42, 3));
  const auto back = TrialRecord::from_json(j);
  EXPECT_EQ(back.to_json(), j);
  EXPECT_EQ(*r.factorial_moment, *r.count_in_j * (*r.count_in_j > 0 ? *r.count_in_j - 1 : 0));
}

TEST(RunEnsemble, SingleSampleSummaryEqualsRecord) {
  EnsembleConfig c = minami_config(1);
  c.half_width = 0.5;
  const auto r = run_ensemble(c);
  ASSERT_EQ(r.records.size(), 1u);
  const double n = static_cast<double>(*r.records[0].count_in_j);
  const auto& stats = r.summary.at("statistics");
  EXPECT_EQ(stats.at(0).at("empirical").get<double>(), n >= 2 ? 1.0 : 0.0);
  EXPECT_EQ(stats.at(1).at("empirical").get<double>(), n * (n - 1));
  EXPECT_EQ(stats.at(1).at("ci_low").get<double>(), n * (n - 1));
}

TEST(RunEnsemble, WorkerCountDoesNotChangeOutputs) {
  for (auto kind : {ExperimentKind::minami, ExperimentKind::chain, ExperimentKind::lemma2,
                    ExperimentKind::gaps}) {
    EnsembleConfig c = minami_config(100);
    c.kind = kind;
    c.sites = 24;
    c.q = 2.5;
    c.output = temp_path("det_a.jsonl");
    const auto a = run_experiment(c, RunOptions{1u, {}});
    const auto a_lines = read_lines(c.output);
    std::ifstream sa(summary_path(c.output));
    const Json a_sum = Json::parse(sa);
    c.output = temp_path("det_b.jsonl");
    const auto b = run_experiment(c, RunOptions{8u, {}});
    const auto b_lines = read_lines(c.output);
    std::ifstream sb(summary_path(c.output));
    const Json b_sum = Json::parse(sb);
    EXPECT_EQ(deterministic_view(a_sum).dump(), deterministic_view(b_sum).dump());
    EXPECT_EQ(deterministic_view(a.summary).dump(), deterministic_view(b.summary).dump());
    EXPECT_EQ(strip_lines(a_lines), strip_lines(b_lines));
    EXPECT_EQ(a_lines.size(), 100u);
    for (std::size_t i = 0; i < a_lines.size(); ++i)
      EXPECT_EQ(Json::parse(a_lines[i]).at("trial_index").get<std::uint64_t>(), i);
  }
}

TEST(RunEnsemble, AbortLeavesParseablePrefixAndNoSummary) {
  EnsembleConfig c = minami_config(50);
  c.output = temp_path("abort.jsonl");
  // Stale summary from an earlier run must not survive.
  { std::ofstream(summary_path(c.output)) << "{}"; }
  RunOptions o;
  o.workers = 4;
  o.after_record = [](const TrialRecord& r) {
    if (r.trial_index == 6) throw std::runtime_error("disk full");
  };
  EXPECT_THROW(run_ensemble(c, o), std::runtime_error);
  const auto lines = read_lines(c.output);
  EXPECT_EQ(lines.size(), 7u);
  for (std::size_t i = 0; i < lines.size(); ++i)
    EXPECT_EQ(Json::parse(lines[i]).at("trial_index").get<std::uint64_t>(), i);
  EXPECT_FALSE(fs::exists(summary_path(c.output)));
}

TEST(RunEnsemble, InvalidConfigRunsNothing) {
  EnsembleConfig c = minami_config(10);
  c.half_width = -1.0;
  c.output = temp_path("invalid.jsonl");
  fs::remove(c.output);
  EXPECT_THROW(run_experiment(c), ConfigError);
  EXPECT_FALSE(fs::exists(c.output));
}

TEST(RunEnsemble, UnwritableOutputFails) {
  EnsembleConfig c = minami_config(3);
  c.output = "/nonexistent-dir/x.jsonl";
  EXPECT_THROW(run_ensemble(c), std::runtime_error);
}

TEST(RunEnsemble, BoundsRecomputableFromEcho) {
  EnsembleConfig c = minami_config(20);
  const auto r = run_ensemble(c);
  const EnsembleConfig echoed = config_from_json(r.summary.at("config"));
  const double bound = minami_bound(Interval::centered(echoed.center, echoed.half_width),
                                    echoed.geometry(), echoed.potential().density_sup());
  EXPECT_EQ(r.summary.at("bound").get<double>(), bound);
  EXPECT_FALSE(r.summary.at("config").contains("workers"));
  EXPECT_FALSE(r.summary.at("config").contains("output"));
}

TEST(RunExperiment, NonEnsembleKinds) {
  EnsembleConfig c;
  c.kind = ExperimentKind::covering;
  c.interval = std::pair{-1.0, 1.0};
  c.q = 3.0;
  c.sites = 2;
  auto r = run_experiment(c);
  EXPECT_EQ(r.summary.at("count").get<std::uint64_t>(), 18u);
  EXPECT_FALSE(r.violated);

  c = EnsembleConfig{};
  c.kind = ExperimentKind::solver_validate;
  c.dimension = 2;
  c.sites = 9;
  r = run_experiment(c);
  EXPECT_FALSE(r.violated);
  EXPECT_LE(r.summary.at("max_eigenvalue_error").get<double>(), 1e-10);

  c = EnsembleConfig{};
  c.kind = ExperimentKind::incompat;
  c.q = 2.25;
  c.samples = 0;
  c.output = temp_path("incompat.csv");
  r = run_experiment(c);
  EXPECT_EQ(read_lines(c.output).size(), 1u + 5u);
  EXPECT_TRUE(fs::exists(summary_path(c.output)));

  c = EnsembleConfig{};
  c.kind = ExperimentKind::lemma1;
  c.schedule = {25, 51};
  c.host_sites = 201;
  r = run_experiment(c);
  EXPECT_FALSE(r.violated);
  EXPECT_EQ(r.summary.at("rows").size(), 2u);
  EXPECT_EQ(r.summary.at("constant_source"), "certified");
}

TEST(SummaryPath, Naming) {
  EXPECT_EQ(summary_path("r.jsonl"), "r.summary.json");
  EXPECT_EQ(summary_path("dir/t.csv"), "dir/t.summary.json");
  EXPECT_EQ(summary_path("x"), "x.summary.json");
}

TEST(DeterministicView, StripsTimingAtAnyDepth) {
  const Json j = Json::parse(R"({"a":1,"runtime_ms":3,"b":[{"elapsed_ms":2,"c":4}],"workers":8})");
  EXPECT_EQ(deterministic_view(j).dump(), R"({"a":1,"b":[{"c":4}]})");
}

TEST(Parallel, OrderedConsumptionAndErrors) {
  for (unsigned w : {1u, 3u, 8u}) {
    const auto v = parallel_map(257, w, [](std::uint64_t i) { return i * i; });
    ASSERT_EQ(v.size(), 257u);
    for (std::uint64_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  }
  EXPECT_THROW(parallel_map(100, 4,
                            [](std::uint64_t i) {
                              if (i == 37) throw std::logic_error("boom");
                              return i;
                            }),
               std::logic_error);
  EXPECT_TRUE(parallel_map(0, 4, [](std::uint64_t i) { return i; }).empty());
}

TEST(Parallel, WorkerCountFromEnvironment) {
  ::setenv("ANDERSON_LAB_WORKERS", "3", 1);
  EXPECT_EQ(default_worker_count(), 3u);
  ::setenv("ANDERSON_LAB_WORKERS", "zero", 1);
  EXPECT_GE(default_worker_count(), 1u);
  ::unsetenv("ANDERSON_LAB_WORKERS");
  EXPECT_GE(default_worker_count(), 1u);
}

}  // namespace
}  // namespace anderson
