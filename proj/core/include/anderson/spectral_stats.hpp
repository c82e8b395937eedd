// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectral_stats.hpp
 * @brief Eigenvalue counting, gaps, Green functions and the per-sample
 *        resolvent identities used by the two-eigenvalue estimates.
 *
 * With J = [E - eta, E + eta] and w_k = eta / ((lambda_k - E)^2 + eta^2)
 * (so Im R(E + i eta) = sum_k w_k v_k v_k^T):
 *   N = #{k : lambda_k in J}, closed interval
 *   pair sum     = sum_{k != l} (2 eta w_k)(2 eta w_l)
 *   trace form   = (2 eta)^2 [ (tr Im R)^2 - tr (Im R)^2 ]     (spectral route)
 *   determinant  = (2 eta)^2 sum_{x,y} det [[ImG_xx, ImG_xy],[ImG_yx, ImG_yy]]
 *                                                              (matrix route)
 * Pair sum, trace form and determinant form agree exactly in exact
 * arithmetic and pointwise 1_J(lambda) <= 2 eta w(lambda), hence
 * N(N-1) <= pair sum for every sample.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "anderson/eigensolver.hpp"
#include "anderson/lattice_model.hpp"

namespace anderson {

/// Closed energy interval [lower, upper].
class Interval {
 public:
  /// Throws std::invalid_argument unless lower <= upper (NaN rejected).
  Interval(double lower, double upper);
  static Interval centered(double center, double half_width);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  double center() const noexcept { return 0.5 * (lower_ + upper_); }
  double half_width() const noexcept { return 0.5 * (upper_ - lower_); }
  double length() const noexcept { return upper_ - lower_; }
  bool contains(double x) const noexcept { return lower_ <= x && x <= upper_; }
  bool contains(const Interval& other) const noexcept {
    return lower_ <= other.lower_ && other.upper_ <= upper_;
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lower_;
  double upper_;
};

/// Number of eigenvalues in the closed interval. `eigenvalues` must be sorted.
std::size_t count_in_interval(std::span<const double> eigenvalues, const Interval& j);
inline std::size_t count_in_interval(const EigenDecomposition& d, const Interval& j) {
  return count_in_interval(d.eigenvalues, j);
}

/// Smallest consecutive spacing among the eigenvalues inside I;
/// nullopt when fewer than two eigenvalues lie in I.
std::optional<double> min_gap(std::span<const double> eigenvalues, const Interval& i);
inline std::optional<double> min_gap(const EigenDecomposition& d, const Interval& i) {
  return min_gap(d.eigenvalues, i);
}

/// G(z; x, y) = <delta_x, (H - z)^{-1} delta_y>. Requires Im z > 0 and vectors.
std::complex<double> green_function(const EigenDecomposition& d, std::complex<double> z,
                                    std::size_t x, std::size_t y);

/// tr Im R(E + i eta) = sum_k eta / ((lambda_k - E)^2 + eta^2). Requires eta > 0.
double im_resolvent_trace(std::span<const double> eigenvalues, double energy, double eta);
inline double im_resolvent_trace(const EigenDecomposition& d, double energy, double eta) {
  return im_resolvent_trace(d.eigenvalues, energy, eta);
}

/// Im R(E + i eta) as a matrix in the site basis.
SymmetricMatrix im_resolvent_matrix(const EigenDecomposition& d, double energy, double eta);

/// det [[ImG_xx, ImG_xy], [ImG_yx, ImG_yy]] for one site pair.
double im_green_det2(const EigenDecomposition& d, double energy, double eta,
                     std::size_t x, std::size_t y);

struct Det2Total {
  double total = 0.0;        ///< sum over all ordered (x, y)
  double min_summand = 0.0;  ///< smallest single determinant
};

/// Sum over x, y of the 2x2 determinants of Im G (unscaled).
Det2Total det2_im_green_total(const EigenDecomposition& d, double energy, double eta);

struct ChainReport {
  std::uint64_t count = 0;
  std::uint64_t factorial_moment = 0;
  double resolvent_pair_sum = 0.0;
  double trace_form = 0.0;
  double determinant_form = 0.0;
  double min_det2_summand = 0.0;

  /// N(N-1) <= pair sum, with rounding slack 1e-12 (1 + pair sum).
  bool pair_bound_holds() const noexcept;
  /// |trace form - determinant form| <= 1e-8 (1 + |trace form|).
  bool identity_holds() const noexcept;
};

/// With `with_determinant` false the determinant form is left at zero and
/// eigenvectors are not needed.
ChainReport chain_report(const EigenDecomposition& d, const Interval& j,
                         bool with_determinant = true);

/// Shared by the chain and its checks: 1_J(lambda) <= 2 eta Im (lambda - (E + i eta))^{-1}.
inline double resolvent_majorant(double lambda, double energy, double eta) noexcept {
  const double t = lambda - energy;
  return 2.0 * eta * eta / (t * t + eta * eta);
}

}  // namespace anderson
