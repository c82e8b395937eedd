// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/minami.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "anderson/parallel.hpp"
#include "anderson/random_streams.hpp"

namespace anderson {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double pair_count(const BoxGeometry& g) {
  const double v = static_cast<double>(g.volume());
  return v * v;
}

}  // namespace

double minami_bound(const Interval& j, const BoxGeometry& geometry, double density_sup) {
  return kPi2 * density_sup * density_sup * j.length() * j.length() * pair_count(geometry);
}

double small_gap_bound(const Interval& i, double q, const BoxGeometry& geometry,
                       double density_sup) {
  const double n = geometry.sites_per_side();
  return 8.0 * kPi2 * density_sup * density_sup * (i.length() + 1.0) *
         std::pow(n, 2.0 * geometry.dimension() - q);
}

SymmetricMatrix sample_hamiltonian(const BoxGeometry& geometry, const PotentialSpec& potential,
                                   std::uint64_t master_seed, std::uint64_t index) {
  return build_hamiltonian(geometry,
                           sample_potential(potential, geometry, derive_seed(master_seed, index)));
}

void MinamiExperimentConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("Minami experiment: samples must be >= 1");
  for (double eta : eta_grid)
    if (!(eta > 0.0)) throw std::invalid_argument("Minami experiment: eta grid must be positive");
}

CountTrial count_trial(const MinamiExperimentConfig& config, std::uint64_t index) {
  const auto eigs = symmetric_eigenvalues(
      sample_hamiltonian(config.geometry, config.potential, config.master_seed, index));
  CountTrial t;
  t.count = count_in_interval(eigs, config.j);
  t.factorial_moment = t.count * (t.count > 0 ? t.count - 1 : 0);
  t.min_gap = min_gap(eigs, config.j);
  return t;
}

namespace {

std::vector<CountTrial> count_trials(const MinamiExperimentConfig& config) {
  config.validate();
  return parallel_map(config.samples, config.workers,
                      [&](std::uint64_t i) { return count_trial(config, i); });
}

FactorialMomentReport fold_counts(const MinamiExperimentConfig& config,
                                  const std::vector<CountTrial>& trials) {
  const double bound = minami_bound(config.j, config.geometry, config.potential.density_sup());
  std::uint64_t doubles = 0;
  std::vector<double> moments;
  moments.reserve(trials.size());
  for (const auto& t : trials) {
    doubles += t.count >= 2;
    moments.push_back(static_cast<double>(t.factorial_moment));
  }
  FactorialMomentReport rep;
  rep.double_occupancy = compare_probability("P(N>=2)", doubles, trials.size(), bound);
  rep.moment = compare_mean("E[N(N-1)]", moments, bound);
  rep.sandwich_holds = rep.double_occupancy.empirical <= rep.moment.empirical;
  return rep;
}

}  // namespace

BoundComparison estimate_double_occupancy(const MinamiExperimentConfig& config) {
  return fold_counts(config, count_trials(config)).double_occupancy;
}

FactorialMomentReport estimate_factorial_moment(const MinamiExperimentConfig& config) {
  return fold_counts(config, count_trials(config));
}

SitePair default_site_pair(const BoxGeometry& geometry) {
  Site origin(static_cast<std::size_t>(geometry.dimension()), 0);
  const std::size_t x = geometry.index(origin);
  Site next = origin;
  next.back() = 1;
  if (geometry.contains(next)) return {x, geometry.index(next)};
  next.back() = -1;
  if (geometry.contains(next)) return {x, geometry.index(next)};
  return {x, x};
}

std::vector<ChainRow> expectation_chain(const MinamiExperimentConfig& config,
                                        std::optional<SitePair> pair) {
  config.validate();
  const std::vector<double> etas =
      config.eta_grid.empty() ? std::vector<double>{config.j.half_width()} : config.eta_grid;
  for (double eta : etas)
    if (!(eta > 0.0)) throw std::invalid_argument("expectation_chain: eta must be > 0");
  const SitePair sites = pair.value_or(default_site_pair(config.geometry));
  const double energy = config.j.center();

  struct Sample {
    std::vector<ChainReport> reports;
    std::vector<double> det2;
  };
  const auto samples = parallel_map(config.samples, config.workers, [&](std::uint64_t i) {
    const auto dec = symmetric_eigen(
        sample_hamiltonian(config.geometry, config.potential, config.master_seed, i));
    Sample s;
    for (double eta : etas) {
      s.reports.push_back(chain_report(dec, Interval::centered(energy, eta)));
      s.det2.push_back(im_green_det2(dec, energy, eta, sites.x, sites.y));
    }
    return s;
  });

  const double rho = config.potential.density_sup();
  std::vector<ChainRow> rows;
  for (std::size_t e = 0; e < etas.size(); ++e) {
    ChainRow row;
    row.eta = etas[e];
    std::vector<double> det_forms, det2s;
    double fm = 0.0, ps = 0.0, tf = 0.0;
    for (const auto& s : samples) {
      const auto& r = s.reports[e];
      fm += static_cast<double>(r.factorial_moment);
      ps += r.resolvent_pair_sum;
      tf += r.trace_form;
      det_forms.push_back(r.determinant_form);
      det2s.push_back(s.det2[e]);
      row.max_identity_defect = std::max(
          row.max_identity_defect,
          std::abs(r.trace_form - r.determinant_form) / (1.0 + std::abs(r.trace_form)));
      row.min_det2_summand = std::min(row.min_det2_summand, r.min_det2_summand);
      row.pair_bound_failures += !r.pair_bound_holds();
    }
    const double n = static_cast<double>(samples.size());
    row.mean_factorial_moment = fm / n;
    row.mean_pair_sum = ps / n;
    row.mean_trace_form = tf / n;
    const double scale = 4.0 * row.eta * row.eta;
    row.ceiling = compare_mean("E[(2eta)^2 sum det2]", det_forms,
                               scale * kPi2 * rho * rho * pair_count(config.geometry));
    row.mean_determinant_form = row.ceiling.empirical;
    row.site_pair = compare_mean("E[det2(x,y)]", det2s, kPi2 * rho * rho);
    row.chain_holds =
        row.mean_factorial_moment <= row.mean_pair_sum + 1e-12 * (1.0 + row.mean_pair_sum) &&
        row.mean_pair_sum <= row.mean_determinant_form + 1e-8 * (1.0 + row.mean_determinant_form);
    rows.push_back(std::move(row));
  }
  return rows;
}

double gap_threshold(int sites_per_side, double q) {
  return static_cast<double>(
      1.0L / std::pow(static_cast<long double>(sites_per_side), static_cast<long double>(q)));
}

Cover::Cover(const Interval& i, double q, int sites_per_side) : i_(i) {
  if (sites_per_side < 1) throw std::invalid_argument("Cover: sites_per_side must be >= 1");
  const long double lq = std::pow(static_cast<long double>(sites_per_side), static_cast<long double>(q));
  h_ = gap_threshold(sites_per_side, q);
  count_ = 2 * (static_cast<std::uint64_t>(std::floor(lq / 2.0L * i.length())) + 1);
}

Interval Cover::tile(std::uint64_t j) const {
  const double left = i_.lower() + static_cast<double>(j) * h_;
  return Interval(left, left + 2.0 * h_);
}

std::optional<std::uint64_t> Cover::find_tile(const Interval& sub) const {
  if (!i_.contains(sub)) return std::nullopt;
  const double offset = (sub.lower() - i_.lower()) / h_;
  const auto guess = static_cast<std::int64_t>(std::floor(offset));
  for (std::int64_t j = guess - 1; j <= guess + 1; ++j) {
    if (j < 0 || static_cast<std::uint64_t>(j) >= count_) continue;
    if (tile(static_cast<std::uint64_t>(j)).contains(sub)) return static_cast<std::uint64_t>(j);
  }
  return std::nullopt;
}

CoveringResult covering_count(const Interval& i, double q, int sites_per_side,
                              std::uint64_t random_probes, std::uint64_t seed) {
  const Cover cover(i, q, sites_per_side);
  CoveringResult res;
  res.count = cover.count();
  res.paper_bound = std::pow(static_cast<double>(sites_per_side), q) * i.length() + 2.0;
  res.passes_paper_bound = static_cast<double>(res.count) <= res.paper_bound;

  const double h = cover.tile_half_length();
  auto probe = [&](double start, double length) {
    ++res.probes;
    const double upper = std::min(start + length, i.upper());
    if (!cover.find_tile(Interval(start, upper))) ++res.probe_failures;
  };
  const double longest = std::min(h, i.length());
  const double room = i.length() - longest;
  // Deterministic sweep including both ends of I.
  constexpr int kGrid = 1000;
  for (int g = 0; g <= kGrid; ++g) probe(i.lower() + room * g / kGrid, longest);
  const CounterStream stream(seed);
  for (std::uint64_t r = 0; r < random_probes; ++r) {
    const double length = r % 2 == 0 ? longest : longest * stream.uniform(2 * r + 1);
    probe(i.lower() + (i.length() - length) * stream.uniform(2 * r), length);
  }
  return res;
}

void Lemma2Config::validate() const {
  if (!(q > 2.0 * geometry.dimension()))
    throw std::invalid_argument("Lemma 2 configuration: need q > 2d (q = " + std::to_string(q) +
                                ", d = " + std::to_string(geometry.dimension()) + ")");
  if (samples < 1) throw std::invalid_argument("Lemma 2 configuration: samples must be >= 1");
}

double Lemma2Config::threshold() const {
  return gap_threshold(geometry.sites_per_side(), q);
}

bool small_gap_event_by_gap(std::span<const double> eigenvalues, const Interval& i,
                            double threshold) {
  const auto gap = min_gap(eigenvalues, i);
  return gap && *gap <= threshold;
}

bool small_gap_event_by_scan(std::span<const double> eigenvalues, const Interval& i,
                             const Cover& cover) {
  const double h = cover.tile_half_length();
  const auto first = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), i.lower());
  const auto last = std::upper_bound(first, eigenvalues.end(), i.upper());
  for (std::uint64_t t = 0; t < cover.count(); ++t) {
    const Interval tile = cover.tile(t);
    for (auto it = std::lower_bound(first, last, tile.lower()); it != last && *it <= tile.upper();
         ++it) {
      // Window [lambda, lambda + h] clipped to I; it must sit inside the tile.
      if (tile.upper() - *it < h && tile.upper() < i.upper()) continue;
      std::size_t in_window = 0;
      for (auto mu = it; mu != last && *mu <= tile.upper() && *mu - *it <= h; ++mu) ++in_window;
      if (in_window >= 2) return true;
    }
  }
  return false;
}

Lemma2Report lemma2_event_frequency(const Lemma2Config& config, std::uint64_t audit_samples) {
  config.validate();
  const double threshold = config.threshold();
  const Cover cover(config.i, config.q, config.geometry.sites_per_side());
  const std::uint64_t audited = std::min(audit_samples, config.samples);

  struct Outcome {
    bool event = false;
    bool disagreement = false;
  };
  const auto outcomes = parallel_map(config.samples, config.workers, [&](std::uint64_t idx) {
    const auto eigs = symmetric_eigenvalues(
        sample_hamiltonian(config.geometry, config.potential, config.master_seed, idx));
    Outcome o;
    o.event = small_gap_event_by_gap(eigs, config.i, threshold);
    if (idx < audited) o.disagreement = o.event != small_gap_event_by_scan(eigs, config.i, cover);
    return o;
  });
  std::uint64_t events = 0, disagreements = 0;
  for (const auto& o : outcomes) {
    events += o.event;
    disagreements += o.disagreement;
  }
  Lemma2Report rep;
  rep.complement = compare_probability(
      "P(E^c)", events, config.samples,
      small_gap_bound(config.i, config.q, config.geometry, config.potential.density_sup()));
  rep.audited = audited;
  rep.audit_disagreements = disagreements;
  return rep;
}

void IncompatibilityConfig::validate() const {
  const double d = dimension;
  if (dimension < 1) throw std::invalid_argument("incompatibility: dimension must be >= 1");
  if (!(q > 2.0 * d))
    throw std::invalid_argument("incompatibility: need q > 2d (q = " + std::to_string(q) + ")");
  if (!(beta - d / 2.0 > q))
    throw std::invalid_argument("incompatibility: need beta - d/2 > q (beta = " +
                                std::to_string(beta) + ", q = " + std::to_string(q) + ")");
  if (!(constant > 0.0)) throw std::invalid_argument("incompatibility: need C > 0");
  if (k_min < 1 || k_max < k_min || k_max > 30)
    throw std::invalid_argument("incompatibility: need 1 <= k_min <= k_max <= 30");
}

std::vector<IncompatibilityRow> incompatibility_demo(const IncompatibilityConfig& config) {
  config.validate();
  const double d = config.dimension;
  const double rho = config.potential.density_sup();
  const double decay = std::pow(2.0, -(config.q - 2.0 * d));
  std::vector<IncompatibilityRow> rows;
  for (int k = config.k_min; k <= config.k_max; ++k) {
    IncompatibilityRow row;
    row.k = k;
    row.scale = 1 << k;
    const double l = row.scale;
    row.width = config.constant * std::pow(l, -(config.beta - d / 2.0));
    row.threshold = gap_threshold(row.scale, config.q);
    row.ratio = row.width / row.threshold;
    row.width_within_threshold = row.width <= row.threshold;
    const BoxGeometry geometry(config.dimension, row.scale);
    row.bound = small_gap_bound(config.i, config.q, geometry, rho);
    row.bound_tail = row.bound / (1.0 - decay);
    if (config.samples > 0) {
      Lemma2Config lc{config.i,       config.q,           geometry,      config.potential,
                      config.samples, config.master_seed, config.workers};
      row.empirical = lemma2_event_frequency(lc, 0).complement;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace anderson
