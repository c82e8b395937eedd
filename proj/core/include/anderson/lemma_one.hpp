// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file lemma_one.hpp
 * @brief Finite-volume consequences of a doubly degenerate eigenvalue with
 *        polynomially decaying eigenfunctions.
 *
 * For phi_1, phi_2 orthonormal, H phi_i = E phi_i and |phi_i(x)| <= C <x>^-beta,
 * with eps_L = C L^(d/2 - beta) the chain checked row by row is
 *   (1) ||phi_i,L^perp|| <= eps_L and ||phi_i,L|| >= sqrt(1 - eps_L^2)
 *   (2) |<phi_1,L, phi_2,L>| <= eps_L^2
 *   (3) ||(H_L - E) phi_i,L|| = ||chi_L Gamma_L phi_i,L^perp|| <= eps_L
 *   (4) ||(H_L - E) psi|| <= 2 eps_L ||psi|| on V_L = span{phi_1,L, phi_2,L}
 *   (5) ||Q psi|| <= (2/3) ||psi||,  Q = 1 - chi_[E-3eps, E+3eps](H_L)
 *   (6) ||P psi||^2 >= (5/9) ||psi||^2
 *   (7) tr chi_[E-3eps, E+3eps](H_L) >= dim V_L = 2
 *
 * The host box stands in for Z^d; L is the inner box's sites per side.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson/eigensolver.hpp"
#include "anderson/lattice_model.hpp"

namespace anderson {

struct DecayCertificate {
  double beta = 0.0;
  double constant = 0.0;  ///< minimal C with |phi(x)| <= C <x>^-beta on the box
  BoxGeometry verified_on{1, 1};

  /// Re-checks the certificate pointwise.
  bool holds_for(std::span<const double> phi) const;
};

/// Requires ||phi|| = 1 within 1e-10.
DecayCertificate certify_decay(std::span<const double> phi, const BoxGeometry& geometry,
                               double beta);

/// Slope of -log|phi| against distance from the peak site, by least squares
/// over sites with |phi| above 1e-13 max|phi|. Positive for localized states.
double exponential_decay_rate(std::span<const double> phi, const BoxGeometry& geometry);

/// Sum over host sites outside the inner box of <x>^(-2 beta).
double decay_tail_sum(const BoxGeometry& host, int inner_sites_per_side, double beta);

/// Sum of |phi|^2 over sites whose sup-norm coordinate exceeds 90% of the
/// host half-width (the outer 10% shell).
double outer_shell_mass(std::span<const double> phi, const BoxGeometry& host);

struct Lemma1Config {
  double energy = 0.0;
  double beta = 3.0;
  double constant = 1.0;  ///< C in eps_L
  std::vector<int> schedule;

  /// beta > d/2 always; beta > 5d/2 when `full_theorem`. Schedule strictly increasing.
  void validate(int dimension, bool full_theorem = false) const;
  double epsilon(int inner_sites_per_side, int dimension) const;
};

struct TruncationNorms {
  double inner_norm = 0.0;  ///< ||phi_L||
  double outer_norm = 0.0;  ///< ||phi_L^perp||
};

TruncationNorms truncation_norms(std::span<const double> phi, const BoxGeometry& host,
                                 int inner_sites_per_side);

/// <phi_1,L, phi_2,L>.
double truncated_overlap(std::span<const double> phi1, std::span<const double> phi2,
                         const BoxGeometry& host, int inner_sites_per_side);

struct BoundaryDefect {
  double defect = 0.0;       ///< ||(H_L - E) phi_L||, computed on the inner box
  double gamma_form = 0.0;   ///< ||chi_L Gamma_L phi_L^perp||, computed on the host
  double leakage = 0.0;      ///< ||chi_L (H - E) phi||; |defect - gamma_form| <= leakage
  double identity_gap = 0.0; ///< ||(H_L - E)phi_L - [chi_L (H - E) phi - chi_L Gamma_L phi_L^perp]||
};

BoundaryDefect boundary_defect(const SymmetricMatrix& host_matrix, const BoxGeometry& host,
                               double energy, std::span<const double> phi,
                               int inner_sites_per_side);

/// Signals that the truncated pair does not span two dimensions.
class LinearDependenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signals that a step's hypothesis failed, so its conclusion is not claimed.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two host vectors and their truncations to the inner box (inner indexing).
struct SpanPair {
  std::vector<double> phi1, phi2;
  std::vector<double> inner1, inner2;
  double gram11 = 0.0, gram12 = 0.0, gram22 = 0.0;

  double gram_determinant() const noexcept { return gram11 * gram22 - gram12 * gram12; }
  /// Gram determinant above 1e-14 gram11 gram22.
  bool independent() const noexcept;
  /// Orthonormal basis of V_L (Gram-Schmidt). Throws LinearDependenceError.
  std::pair<std::vector<double>, std::vector<double>> orthonormal_basis() const;
};

SpanPair make_span_pair(std::span<const double> phi1, std::span<const double> phi2,
                        const BoxGeometry& host, int inner_sites_per_side);

/// sup over unit psi in V_L of ||(H_L - E) psi||, via the 2x2 problem
/// M^T M c = s^2 G c. Throws LinearDependenceError.
double span_defect(const SpanPair& pair, const SymmetricMatrix& inner_matrix, double energy);

struct ProjectionReport {
  double q_ratio_max = 0.0;        ///< max ||Q psi|| / ||psi|| over the angular sweep
  double q_ratio_exact = 0.0;      ///< the same maximum from the 2x2 reduction
  double p_ratio_min = 0.0;        ///< min ||P psi|| / ||psi|| over the sweep
  double pythagoras_defect = 0.0;  ///< max | ||P psi||^2 + ||Q psi||^2 - ||psi||^2 |
  bool q_bound_holds = true;       ///< 3 eps ||Q psi|| <= ||(H_L - E) Q psi|| on every sample
  std::size_t count_in_3eps = 0;   ///< tr chi_[E-3eps, E+3eps](H_L)
};

inline constexpr int kProjectionSweepSamples = 360;

/// Throws PreconditionError unless span_defect <= 2 eps (given as `defect`).
ProjectionReport projection_argument(const EigenDecomposition& inner_decomposition,
                                     const SymmetricMatrix& inner_matrix, const SpanPair& pair,
                                     double energy, double eps, double defect);

/// (H_host, E, phi_1, phi_2) on a host box.
struct Lemma1Instance {
  BoxGeometry host{1, 1};
  SymmetricMatrix hamiltonian;
  double energy = 0.0;
  std::vector<double> phi1, phi2;
  double eigen_residual = 0.0;      ///< max_i ||H phi_i - E phi_i||
  double second_energy = 0.0;       ///< Rayleigh quotient of phi_2
  double max_shell_mass = 0.0;      ///< outer-shell mass, max over the pair
  bool host_gate_passed = true;     ///< shell mass below 1e-8
};

/// Prescribed degenerate pair in d = 1: phi_1 ~ <x>^-beta (even),
/// phi_2 ~ x <x>^(-beta-1) (odd), and
/// H = E P + (1 - P) A (1 - P) with A = -Delta + V, V iid from `base`.
Lemma1Instance synthetic_instance(const BoxGeometry& host, double beta, double energy,
                                  const PotentialSpec& base, std::uint64_t seed);

/// Two eigenvectors of a host Anderson sample with eigenvalues closest to
/// `target` among those passing the outer-shell gate.
Lemma1Instance anderson_instance(const BoxGeometry& host, const PotentialSpec& potential,
                                 std::uint64_t seed, double target);

/// C ensuring (1) on the schedule from the decay certificates:
/// max_i C_phi_i * max_L sqrt(tail(L)) L^(beta - d/2).
double certified_constant(const Lemma1Instance& instance, double beta,
                          std::span<const int> schedule);

struct Lemma1Row {
  int inner_sites = 0;
  double eps = 0.0;
  double j_width = 0.0;  ///< |[E - 3 eps, E + 3 eps]|
  std::size_t count = 0;
  double outer_norm_max = 0.0;
  double inner_norm_min = 0.0;
  double overlap = 0.0;
  double defect_max = 0.0;
  double gamma_form_max = 0.0;
  double span_defect = 0.0;
  double q_ratio_max = 0.0;
  double q_ratio_exact = 0.0;
  double p_ratio_min = 0.0;
  double c_required = 0.0;  ///< smallest C for which (1)-(4) hold at this L
  bool eq1 = false, eq2 = false, eq3 = false, independent = false, eq4 = false;
  bool eq5 = false, eq6 = false, eq7 = false;
  std::string error;  ///< nonempty if a sub-step refused

  /// Hypotheses (1)-(4) of the projection step.
  bool hypotheses() const noexcept { return eq1 && eq2 && eq3 && independent && eq4; }
  bool all_flags() const noexcept { return hypotheses() && eq5 && eq6 && eq7; }
};

std::vector<Lemma1Row> lemma1_experiment(const Lemma1Config& config,
                                         const Lemma1Instance& instance);

/// Smallest scheduled L from which every later row has all flags set.
std::optional<int> lemma1_threshold(std::span<const Lemma1Row> rows);

/// Rows where the hypotheses held but a conclusion failed.
std::size_t lemma1_contradictions(std::span<const Lemma1Row> rows);

}  // namespace anderson
