// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace anderson {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion.
ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                   double z = kZ99);

/// mean +- z s / sqrt(n) with s the unbiased sample deviation (0 for n = 1).
ConfidenceInterval normal_mean_interval(double mean, double sample_sd, std::uint64_t n,
                                        double z = kZ99);

struct SampleMoments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double sample_sd = 0.0;
};

/// Welford pass in the given order; deterministic for a fixed sequence.
SampleMoments sample_moments(std::span<const double> values);

/// An empirical statistic against an optional bound. `violated` only when
/// the whole interval lies above the bound.
struct BoundComparison {
  std::string name;
  double empirical = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::optional<double> bound;
  bool violated = false;
};

BoundComparison compare_probability(std::string name, std::uint64_t successes,
                                    std::uint64_t trials, std::optional<double> bound);
BoundComparison compare_mean(std::string name, std::span<const double> values,
                             std::optional<double> bound);
/// Exact comparison without sampling error (interval collapses to the value).
BoundComparison compare_exact(std::string name, double value, std::optional<double> bound,
                              double slack = 0.0);

}  // namespace anderson
