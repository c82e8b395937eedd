// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file harness.hpp
 * @brief Experiment configuration, reproducible ensemble execution and the
 *        JSONL / JSON / CSV outputs.
 *
 * Trial i always uses derive_seed(seed, i). Trial records are written to the
 * JSONL sink in trial-index order and every summary statistic is a fold over
 * records in that order, so outputs do not depend on the worker count.
 * Timing fields ("elapsed_ms", "runtime_ms") and the worker count are the
 * only run-dependent values; deterministic_view() strips them.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "anderson/confidence.hpp"
#include "anderson/lattice_model.hpp"
#include "anderson/spectral_stats.hpp"

namespace anderson {

using Json = nlohmann::ordered_json;

enum class ExperimentKind {
  minami,
  factorial_moment,
  chain,
  lemma2,
  lemma1,
  gaps,
  solver_validate,
  covering,
  incompat,
};

/// "minami", "factorial-moment", "chain", "lemma2", "lemma1", "gaps",
/// "solver-validate", "covering", "incompat".
std::string to_string(ExperimentKind kind);
/// Accepts the names above; "moment" is an alias of "factorial-moment".
ExperimentKind parse_experiment_kind(const std::string& name);

/// Invalid configuration; raised before any trial runs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gap below which two eigenvalues count as numerically degenerate.
inline constexpr double kDegeneracyTolerance = 1e-12;

struct EnsembleConfig {
  ExperimentKind kind = ExperimentKind::minami;
  int dimension = 1;
  int sites = 100;
  double potential_lower = -2.0;
  double potential_upper = 2.0;

  // minami / factorial-moment / chain
  double center = 0.0;
  double half_width = 0.01;
  std::vector<double> eta_grid;

  // lemma2 / gaps / incompat
  std::optional<std::pair<double, double>> interval;
  double q = 2.5;

  // lemma1 / incompat
  double beta = 3.0;
  std::optional<double> constant;  ///< lemma1: unset = certified from decay; incompat: unset = 1
  std::vector<int> schedule{25, 51, 101, 201};
  int host_sites = 401;
  std::string lemma1_mode = "synthetic";  ///< "synthetic" or "anderson"
  int k_min = 3;
  int k_max = 7;

  std::uint64_t samples = 1000;
  std::uint64_t seed = 42;
  std::string output;   ///< empty = no files
  unsigned workers = 0; ///< advisory; 0 = default

  PotentialSpec potential() const { return PotentialSpec::uniform(potential_lower, potential_upper); }
  BoxGeometry geometry() const { return BoxGeometry(dimension, sites); }
  /// I for lemma2/gaps/incompat; gaps default to a Gershgorin enclosure of the spectrum.
  Interval resolved_interval() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Full, lossless serialization (including output and workers).
Json to_json(const EnsembleConfig& config);
/// Inverse of to_json; unknown keys are rejected, missing keys keep defaults.
EnsembleConfig config_from_json(const Json& j);
/// The experiment-defining part echoed in summaries (no output path, no workers).
Json config_echo(const EnsembleConfig& config);

struct TrialRecord {
  std::uint64_t trial_index = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> count_in_j;
  std::optional<double> min_gap_in_i;
  std::optional<std::uint64_t> factorial_moment;
  double elapsed_ms = 0.0;
  Json extra = Json::object();  ///< experiment-specific fields, appended after the fixed ones

  Json to_json() const;
  static TrialRecord from_json(const Json& j);
};

/// Runs trial `index` of an ensemble experiment (minami, factorial-moment,
/// chain, lemma2, gaps).
TrialRecord run_trial(const EnsembleConfig& config, std::uint64_t index);

struct RunOptions {
  std::optional<unsigned> workers;  ///< overrides config.workers
  /// Called after each record is written, in index order; an exception here
  /// aborts the run (used to exercise partial-output handling).
  std::function<void(const TrialRecord&)> after_record;
};

struct ExperimentResult {
  Json summary;
  std::vector<TrialRecord> records;  ///< ensemble experiments only
  std::string table_csv;             ///< lemma1 and incompat
  bool violated = false;
};

bool is_ensemble(ExperimentKind kind);

/// Validates, runs and (when config.output is set) writes
///   output                - JSONL trial records, or the CSV table
///   summary_path(output)  - summary JSON
/// On a failure mid-run the JSONL keeps every completed line and no summary
/// is written; the exception propagates.
ExperimentResult run_experiment(const EnsembleConfig& config, const RunOptions& options = {});

/// Ensemble experiments only.
ExperimentResult run_ensemble(const EnsembleConfig& config, const RunOptions& options = {});

/// "r.jsonl" -> "r.summary.json", "t.csv" -> "t.summary.json", "x" -> "x.summary.json".
std::string summary_path(const std::string& output);

/// Copy of `j` without "elapsed_ms", "runtime_ms" and "workers" at any depth.
Json deterministic_view(const Json& j);

Json to_json(const BoundComparison& c);

}  // namespace anderson
