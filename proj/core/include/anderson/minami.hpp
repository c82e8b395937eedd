// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file minami.hpp
 * @brief Monte Carlo checks of the two-eigenvalue (Minami) bound, the
 *        small-gap event bound built on it, and the multiscale
 *        incompatibility argument at finite scales.
 *
 * Scale convention: L is the number of sites per side n, so L^(2d) is the
 * number of ordered site pairs |Lambda|^2.
 *
 *   P{N_J >= 2} <= E{N_J (N_J - 1)} <= pi^2 rho^2 |J|^2 L^(2d)
 *   P{some J in I, |J| <= L^-q, has N_J >= 2} <= 8 pi^2 rho^2 (|I| + 1) L^(2d - q)
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "anderson/confidence.hpp"
#include "anderson/eigensolver.hpp"
#include "anderson/lattice_model.hpp"
#include "anderson/spectral_stats.hpp"

namespace anderson {

/// pi^2 rho^2 |J|^2 (n^d)^2.
double minami_bound(const Interval& j, const BoxGeometry& geometry, double density_sup);

/// 8 pi^2 rho^2 (|I| + 1) n^(2d - q).
double small_gap_bound(const Interval& i, double q, const BoxGeometry& geometry,
                       double density_sup);

/// H for trial `index` of an ensemble seeded by `master_seed`.
SymmetricMatrix sample_hamiltonian(const BoxGeometry& geometry, const PotentialSpec& potential,
                                   std::uint64_t master_seed, std::uint64_t index);

struct MinamiExperimentConfig {
  BoxGeometry geometry{1, 100};
  PotentialSpec potential = PotentialSpec::uniform(-2.0, 2.0);
  Interval j = Interval::centered(0.0, 0.01);
  std::uint64_t samples = 1000;
  std::uint64_t master_seed = 42;
  std::vector<double> eta_grid;  ///< half-widths for the resolvent chain; empty = {|J|/2}
  unsigned workers = 0;

  void validate() const;
};

/// Per-trial counts. Eigenvalues only.
struct CountTrial {
  std::uint64_t count = 0;
  std::uint64_t factorial_moment = 0;
  std::optional<double> min_gap;
};

CountTrial count_trial(const MinamiExperimentConfig& config, std::uint64_t index);

/// Frequency of N_J >= 2 (Wilson 99%) against minami_bound.
BoundComparison estimate_double_occupancy(const MinamiExperimentConfig& config);

struct FactorialMomentReport {
  BoundComparison moment;            ///< mean N(N-1), normal 99%, against minami_bound
  BoundComparison double_occupancy;  ///< frequency of N >= 2, same bound
  bool sandwich_holds = true;        ///< frequency(N >= 2) <= mean N(N-1)
};

FactorialMomentReport estimate_factorial_moment(const MinamiExperimentConfig& config);

/// Ensemble means of the per-sample chain at one eta.
struct ChainRow {
  double eta = 0.0;
  double mean_factorial_moment = 0.0;
  double mean_pair_sum = 0.0;
  double mean_trace_form = 0.0;
  double mean_determinant_form = 0.0;
  double max_identity_defect = 0.0;  ///< max |trace - det| / (1 + |trace|)
  double min_det2_summand = 0.0;
  std::uint64_t pair_bound_failures = 0;
  bool chain_holds = false;   ///< mean N(N-1) <= mean pair sum <= mean det form (equal up to 1e-8)
  BoundComparison ceiling;    ///< mean det form vs (2 eta)^2 pi^2 rho^2 (n^d)^2
  BoundComparison site_pair;  ///< mean det2 at the fixed pair vs pi^2 rho^2
};

/// Defaults to the origin and its successor along the last axis.
struct SitePair {
  std::size_t x = 0;
  std::size_t y = 0;
};
SitePair default_site_pair(const BoxGeometry& geometry);

std::vector<ChainRow> expectation_chain(const MinamiExperimentConfig& config,
                                        std::optional<SitePair> pair = std::nullopt);

/// n^-q, the gap scale below which two eigenvalues form a small-gap pair.
double gap_threshold(int sites_per_side, double q);

/// Overlapping tiling of I by intervals of length 2h, h = n^-q, with left
/// ends at I.lower + j h. Any subinterval of length <= h lies in a tile.
class Cover {
 public:
  Cover(const Interval& i, double q, int sites_per_side);

  std::uint64_t count() const noexcept { return count_; }
  double tile_half_length() const noexcept { return h_; }
  Interval tile(std::uint64_t j) const;
  /// A tile containing `sub`, or nullopt.
  std::optional<std::uint64_t> find_tile(const Interval& sub) const;

 private:
  Interval i_;
  double h_;
  std::uint64_t count_;
};

struct CoveringResult {
  std::uint64_t count = 0;     ///< 2 (floor((n^q / 2)|I|) + 1)
  double paper_bound = 0.0;    ///< n^q |I| + 2
  bool passes_paper_bound = false;
  std::uint64_t probes = 0;
  std::uint64_t probe_failures = 0;
};

CoveringResult covering_count(const Interval& i, double q, int sites_per_side,
                              std::uint64_t random_probes = 10000, std::uint64_t seed = 1);

struct Lemma2Config {
  Interval i{-1.0, 1.0};
  double q = 2.5;
  BoxGeometry geometry{1, 64};
  PotentialSpec potential = PotentialSpec::uniform(-2.0, 2.0);
  std::uint64_t samples = 1000;
  std::uint64_t master_seed = 42;
  unsigned workers = 0;

  /// Throws std::invalid_argument unless q > 2d.
  void validate() const;
  double threshold() const;  ///< n^-q
};

/// Complement event by the consecutive-gap criterion.
bool small_gap_event_by_gap(std::span<const double> eigenvalues, const Interval& i,
                            double threshold);
/// Complement event by scanning windows [lambda, lambda + h] inside each tile.
bool small_gap_event_by_scan(std::span<const double> eigenvalues, const Interval& i,
                             const Cover& cover);

struct Lemma2Report {
  BoundComparison complement;        ///< frequency of the small-gap event vs the bound
  std::uint64_t audited = 0;
  std::uint64_t audit_disagreements = 0;
};

Lemma2Report lemma2_event_frequency(const Lemma2Config& config, std::uint64_t audit_samples = 100);

struct IncompatibilityConfig {
  double beta = 3.0;
  double q = 2.25;
  int dimension = 1;
  double constant = 1.0;  ///< C in the interval width C L^-(beta - d/2)
  int k_min = 1;
  int k_max = 7;
  Interval i{-1.0, 1.0};
  PotentialSpec potential = PotentialSpec::uniform(-2.0, 2.0);
  std::uint64_t samples = 0;  ///< 0 = bounds only
  std::uint64_t master_seed = 42;
  unsigned workers = 0;

  /// Throws std::invalid_argument naming the failed inequality 2d < q < beta - d/2.
  void validate() const;
};

struct IncompatibilityRow {
  int k = 0;
  int scale = 0;           ///< L_k = 2^k
  double width = 0.0;      ///< C L^-(beta - d/2)
  double threshold = 0.0;  ///< L^-q
  double ratio = 0.0;      ///< width / threshold
  bool width_within_threshold = false;
  double bound = 0.0;      ///< small_gap_bound at L_k
  double bound_tail = 0.0; ///< sum over k' >= k of the bound (geometric series limit)
  std::optional<BoundComparison> empirical;
};

std::vector<IncompatibilityRow> incompatibility_demo(const IncompatibilityConfig& config);

}  // namespace anderson
