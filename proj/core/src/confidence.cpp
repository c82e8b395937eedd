// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anderson {

ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes > trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The score interval always contains 0 when p = 0 and 1 when p = 1.
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

ConfidenceInterval normal_mean_interval(double mean, double sample_sd, std::uint64_t n, double z) {
  if (n == 0) throw std::invalid_argument("normal_mean_interval: no samples");
  const double half = z * sample_sd / std::sqrt(static_cast<double>(n));
  return {mean - half, mean + half};
}

SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments m;
  double m2 = 0.0;
  for (double x : values) {
    ++m.n;
    const double delta = x - m.mean;
    m.mean += delta / static_cast<double>(m.n);
    m2 += delta * (x - m.mean);
  }
  m.sample_sd = m.n > 1 ? std::sqrt(m2 / static_cast<double>(m.n - 1)) : 0.0;
  return m;
}

BoundComparison compare_probability(std::string name, std::uint64_t successes,
                                    std::uint64_t trials, std::optional<double> bound) {
  BoundComparison c;
  c.name = std::move(name);
  c.empirical = static_cast<double>(successes) / static_cast<double>(trials);
  const auto ci = wilson_interval(successes, trials);
  c.ci_low = ci.low;
  c.ci_high = ci.high;
  c.bound = bound;
  c.violated = bound && c.ci_low > *bound;
  return c;
}

BoundComparison compare_mean(std::string name, std::span<const double> values,
                             std::optional<double> bound) {
  const auto m = sample_moments(values);
  BoundComparison c;
  c.name = std::move(name);
  c.empirical = m.mean;
  const auto ci = normal_mean_interval(m.mean, m.sample_sd, m.n);
  c.ci_low = ci.low;
  c.ci_high = ci.high;
  c.bound = bound;
  c.violated = bound && c.ci_low > *bound;
  return c;
}

BoundComparison compare_exact(std::string name, double value, std::optional<double> bound,
                              double slack) {
  BoundComparison c;
  c.name = std::move(name);
  c.empirical = c.ci_low = c.ci_high = value;
  c.bound = bound;
  c.violated = bound && value > *bound + slack;
  return c;
}

}  // namespace anderson
