// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "anderson/lemma_one.hpp"
#include "oracles/angular_grid.hpp"

namespace anderson {
namespace {

std::vector<double> normalized(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

std::vector<double> power_profile(const BoxGeometry& g, double beta) {
  std::vector<double> v(g.volume());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(japanese_bracket(g.site(k)), -beta);
  return normalized(v);
}

const Lemma1Instance& reference_instance() {
  static const Lemma1Instance inst =
      synthetic_instance(BoxGeometry(1, 401), 3.0, 0.0, PotentialSpec::uniform(-2.0, 2.0), 42);
  return inst;
}

TEST(DecayCertificate, MinimalConstant) {
  const BoxGeometry g(1, 41);
  const auto phi = power_profile(g, 2.0);
  const auto cert = certify_decay(phi, g, 2.0);
  EXPECT_TRUE(cert.holds_for(phi));
  double c = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k)
    c = std::max(c, std::abs(phi[k]) * std::pow(japanese_bracket(g.site(k)), 2.0));
  EXPECT_NEAR(cert.constant, c, 1e-14);
  // A slower decay is not certified by the same constant.
  auto worse = power_profile(g, 1.0);
  EXPECT_FALSE(cert.holds_for(worse));
  EXPECT_THROW(certify_decay(std::vector<double>(41, 1.0), g, 2.0), std::invalid_argument);
}

TEST(DecayRate, RecoversExponent) {
  const BoxGeometry g(1, 61);
  std::vector<double> v(61);
  for (std::size_t k = 0; k < 61; ++k) v[k] = std::exp(-0.7 * std::abs(g.site(k)[0]));
  EXPECT_NEAR(exponential_decay_rate(normalized(v), g), 0.7, 1e-9);
}

TEST(Truncation, PythagorasAndTail) {
  const BoxGeometry host(2, 21);
  const auto phi = power_profile(host, 2.5);
  for (int l : {1, 5, 11, 21}) {
    const auto t = truncation_norms(phi, host, l);
    EXPECT_NEAR(t.inner_norm * t.inner_norm + t.outer_norm * t.outer_norm, 1.0, 1e-13);
    // |phi| <= C <x>^-beta gives ||phi^perp||^2 <= C^2 tail(L).
    const double c = certify_decay(phi, host, 2.5).constant;
    EXPECT_LE(t.outer_norm, c * std::sqrt(decay_tail_sum(host, l, 2.5)) * (1 + 1e-12));
  }
  EXPECT_EQ(truncation_norms(phi, host, 21).outer_norm, 0.0);
  EXPECT_EQ(decay_tail_sum(host, 21, 2.5), 0.0);
}

TEST(Truncation, OverlapOfOrthogonalPair) {
  const auto& inst = reference_instance();
  EXPECT_NEAR(std::inner_product(inst.phi1.begin(), inst.phi1.end(), inst.phi2.begin(), 0.0), 0.0,
              1e-14);
  // Parity: the even and odd profiles stay orthogonal after symmetric truncation.
  EXPECT_NEAR(truncated_overlap(inst.phi1, inst.phi2, inst.host, 51), 0.0, 1e-12);
}

TEST(OuterShell, MassLocation) {
  const BoxGeometry host(1, 101);
  std::vector<double> phi(101, 0.0);
  phi[host.index(Site{0})] = 1.0;
  EXPECT_EQ(outer_shell_mass(phi, host), 0.0);
  phi.assign(101, 0.0);
  phi[host.index(Site{50})] = 1.0;
  EXPECT_EQ(outer_shell_mass(phi, host), 1.0);
}

TEST(BoundaryDefect, IdentityAndLeakage) {
  const auto& inst = reference_instance();
  for (int l : {25, 101, 201}) {
    for (const auto* phi : {&inst.phi1, &inst.phi2}) {
      const auto b = boundary_defect(inst.hamiltonian, inst.host, inst.energy, *phi, l);
      EXPECT_LE(b.identity_gap, 1e-12);
      EXPECT_LE(std::abs(b.defect - b.gamma_form), b.leakage + 1e-13);
      EXPECT_LE(b.leakage, 1e-10);
    }
  }
}

TEST(SpanDefect, MatchesAngularBruteForce) {
  const auto& inst = reference_instance();
  for (int l : {25, 51}) {
    const auto pair = make_span_pair(inst.phi1, inst.phi2, inst.host, l);
    const auto h_l = restrict_to_inner(inst.hamiltonian, inst.host, l);
    const double exact = span_defect(pair, h_l, inst.energy);
    const double grid = oracle::angular_sup(
        [&](std::span<const double> x) { return h_l.apply(x); }, inst.energy, pair.inner1,
        pair.inner2);
    EXPECT_GE(exact, grid * (1 - 1e-12));
    EXPECT_NEAR(exact, grid, 1e-6 * exact);
  }
}

TEST(SpanPair, DependentPairRejected) {
  const BoxGeometry host(1, 21);
  const auto phi = power_profile(host, 2.0);
  const auto pair = make_span_pair(phi, phi, host, 11);
  EXPECT_FALSE(pair.independent());
  EXPECT_THROW(pair.orthonormal_basis(), LinearDependenceError);
  SymmetricMatrix h(11);
  EXPECT_THROW(span_defect(pair, h, 0.0), LinearDependenceError);
}

TEST(Projection, ReportConsistency) {
  const auto& inst = reference_instance();
  Lemma1Config cfg{inst.energy, 3.0, certified_constant(inst, 3.0, std::vector<int>{51}), {51}};
  const double eps = cfg.epsilon(51, 1);
  const auto pair = make_span_pair(inst.phi1, inst.phi2, inst.host, 51);
  const auto h_l = restrict_to_inner(inst.hamiltonian, inst.host, 51);
  const auto dec = symmetric_eigen(h_l);
  const double defect = span_defect(pair, h_l, inst.energy);
  const auto rep = projection_argument(dec, h_l, pair, inst.energy, eps, defect);
  EXPECT_LE(rep.pythagoras_defect, 1e-12);
  EXPECT_LE(rep.q_ratio_max, rep.q_ratio_exact + 1e-12);
  EXPECT_NEAR(rep.q_ratio_max, rep.q_ratio_exact, 1e-4);
  EXPECT_LE(rep.q_ratio_exact, 2.0 / 3.0);
  EXPECT_GE(rep.p_ratio_min * rep.p_ratio_min, 5.0 / 9.0);
  EXPECT_TRUE(rep.q_bound_holds);
  EXPECT_GE(rep.count_in_3eps, 2u);
  EXPECT_THROW(projection_argument(dec, h_l, pair, inst.energy, 0.49 * defect, defect),
               PreconditionError);
}

TEST(Lemma1Config, Validation) {
  Lemma1Config c{0.0, 3.0, 1.0, {25, 51}};
  EXPECT_NO_THROW(c.validate(1));
  EXPECT_NO_THROW(c.validate(1, true));
  c.beta = 2.0;
  EXPECT_THROW(c.validate(1, true), std::invalid_argument);
  EXPECT_NO_THROW(c.validate(1));
  c.beta = 0.5;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  c.beta = 3.0;
  c.schedule = {51, 25};
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  c.schedule = {25};
  c.constant = 0.0;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  c.constant = 2.0;
  EXPECT_DOUBLE_EQ(c.epsilon(100, 1), 2.0 * std::pow(100.0, -2.5));
}

TEST(SyntheticInstance, ExactDegeneratePair) {
  const auto& inst = reference_instance();
  EXPECT_LE(inst.eigen_residual, 1e-11);
  EXPECT_NEAR(inst.second_energy, inst.energy, 1e-12);
  EXPECT_TRUE(inst.host_gate_passed);
  EXPECT_NEAR(std::inner_product(inst.phi1.begin(), inst.phi1.end(), inst.phi1.begin(), 0.0), 1.0,
              1e-14);
  const auto c1 = certify_decay(inst.phi1, inst.host, 3.0);
  const auto c2 = certify_decay(inst.phi2, inst.host, 3.0);
  EXPECT_TRUE(c1.holds_for(inst.phi1));
  EXPECT_TRUE(c2.holds_for(inst.phi2));
}

TEST(Lemma1Experiment, ChainHoldsOnSchedule) {
  const auto& inst = reference_instance();
  const std::vector<int> schedule{25, 51, 101, 201};
  Lemma1Config cfg{inst.energy, 3.0, certified_constant(inst, 3.0, schedule), schedule};
  const auto rows = lemma1_experiment(cfg, inst);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.all_flags()) << r.inner_sites << " " << r.error;
    EXPECT_LE(r.c_required, cfg.constant * (1 + 1e-12));
    EXPECT_DOUBLE_EQ(r.j_width, 6.0 * r.eps);
  }
  EXPECT_EQ(lemma1_threshold(rows), 25);
  EXPECT_EQ(lemma1_contradictions(rows), 0u);
}

TEST(Lemma1Experiment, TooSmallConstantFailsHypothesesWithoutContradiction) {
  const auto& inst = reference_instance();
  const std::vector<int> schedule{25, 51};
  Lemma1Config cfg{inst.energy, 3.0, 1e-3, schedule};
  const auto rows = lemma1_experiment(cfg, inst);
  for (const auto& r : rows) EXPECT_FALSE(r.hypotheses());
  EXPECT_EQ(lemma1_contradictions(rows), 0u);
  EXPECT_FALSE(lemma1_threshold(rows).has_value());
}

TEST(AndersonInstance, LocalizedPairPassesGate) {
  const BoxGeometry host(1, 201);
  const auto inst = anderson_instance(host, PotentialSpec::uniform(-8.0, 8.0), 3, 0.0);
  EXPECT_TRUE(inst.host_gate_passed);
  // phi_2 is an eigenvector for its own eigenvalue, so the residual at E is the splitting.
  EXPECT_NEAR(inst.eigen_residual, std::abs(inst.second_energy - inst.energy), 1e-10);
  EXPECT_GT(exponential_decay_rate(inst.phi1, host), 0.5);
}

}  // namespace
}  // namespace anderson
