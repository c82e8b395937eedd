// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "anderson/confidence.hpp"

namespace anderson {
namespace {

TEST(Wilson, ReferenceValues) {
  // Reference: statsmodels proportion_confint(method="wilson", alpha=0.01).
  struct Case { std::uint64_t x, n; double lo, hi; };
  for (const Case& c : {Case{52, 2000, 0.018283434726419977, 0.03685110758041539},
                        Case{0, 100, 0.0, 0.062220687715822995},
                        Case{100, 100, 0.93777931228417721, 1.0},
                        Case{5, 10000, 0.00016707879301558156, 0.0014953078907107961}}) {
    const auto ci = wilson_interval(c.x, c.n);
    EXPECT_NEAR(ci.low, c.lo, 1e-14) << c.x << "/" << c.n;
    EXPECT_NEAR(ci.high, c.hi, 1e-14) << c.x << "/" << c.n;
  }
}

TEST(Wilson, ContainsPointEstimateAndNarrows) {
  for (std::uint64_t n : {1u, 10u, 1000u})
    for (std::uint64_t x = 0; x <= n; x += std::max<std::uint64_t>(1, n / 7)) {
      const auto ci = wilson_interval(x, n);
      const double p = static_cast<double>(x) / n;
      EXPECT_LE(ci.low, p);
      EXPECT_GE(ci.high, p);
      EXPECT_GE(ci.low, 0.0);
      EXPECT_LE(ci.high, 1.0);
    }
  EXPECT_LT(wilson_interval(50, 10000).high - wilson_interval(50, 10000).low,
            wilson_interval(5, 1000).high - wilson_interval(5, 1000).low);
  EXPECT_THROW(wilson_interval(3, 2), std::invalid_argument);
  EXPECT_THROW(wilson_interval(0, 0), std::invalid_argument);
}

TEST(NormalMean, Interval) {
  const auto ci = normal_mean_interval(1.0, 2.0, 100);
  EXPECT_NEAR(ci.low, 1.0 - kZ99 * 0.2, 1e-15);
  EXPECT_NEAR(ci.high, 1.0 + kZ99 * 0.2, 1e-15);
  const auto one = normal_mean_interval(3.0, 0.0, 1);
  EXPECT_EQ(one.low, 3.0);
  EXPECT_EQ(one.high, 3.0);
}

TEST(SampleMoments, MatchesTwoPass) {
  std::vector<double> v;
  for (int k = 0; k < 1000; ++k) v.push_back(1e6 + std::sin(k) * 3.0);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const auto m = sample_moments(v);
  EXPECT_EQ(m.n, 1000u);
  EXPECT_NEAR(m.mean, mean, 1e-14 * 1e6 * 1000);
  EXPECT_NEAR(m.sample_sd, std::sqrt(ss / 999.0), 1e-9);
  EXPECT_EQ(sample_moments(std::vector<double>{4.0}).sample_sd, 0.0);
}

TEST(BoundComparison, ViolationNeedsWholeIntervalAbove) {
  const std::vector<double> v{1.0, 2.0, 3.0};
  EXPECT_FALSE(compare_mean("m", v, 2.0).violated);
  EXPECT_FALSE(compare_mean("m", v, std::nullopt).violated);
  EXPECT_TRUE(compare_mean("m", v, -10.0).violated);
  EXPECT_FALSE(compare_probability("p", 3, 10, 0.1).violated);
  EXPECT_TRUE(compare_probability("p", 90, 100, 0.5).violated);
  EXPECT_FALSE(compare_exact("e", 1.0, 1.0).violated);
  EXPECT_TRUE(compare_exact("e", 1.0 + 1e-9, 1.0).violated);
  EXPECT_FALSE(compare_exact("e", 1.0 + 1e-9, 1.0, 1e-8).violated);
  const auto p = compare_probability("p", 0, 10, 0.0);
  EXPECT_FALSE(p.violated);
  EXPECT_EQ(p.name, "p");
}

}  // namespace
}  // namespace anderson
