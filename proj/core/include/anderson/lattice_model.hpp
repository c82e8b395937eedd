// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file lattice_model.hpp
 * @brief Finite boxes of Z^d, iid potentials and the
 *        Hamiltonian H = -Delta + V with zero boundary conditions.
 *
 * Box convention: a box with n sites per side has coordinates
 * x_i in {-floor(n/2), ..., ceil(n/2) - 1}. For odd n this is the
 * symmetric box |x_i| <= (n-1)/2. Sites are indexed lexicographically
 * with the first coordinate most significant, so nearest neighbours along
 * axis i are n^(d-1-i) indices apart.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace anderson {

using Site = std::vector<int>;

class BoxGeometry {
 public:
  /// Throws std::invalid_argument for dimension < 1 or sites_per_side < 1.
  BoxGeometry(int dimension, int sites_per_side);

  int dimension() const noexcept { return dimension_; }
  int sites_per_side() const noexcept { return sites_per_side_; }
  std::size_t volume() const noexcept { return volume_; }

  /// Smallest coordinate value along each axis.
  int lowest_coordinate() const noexcept { return -(sites_per_side_ / 2); }
  int highest_coordinate() const noexcept {
    return lowest_coordinate() + sites_per_side_ - 1;
  }

  /// Index distance between neighbours along `axis`.
  std::size_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }

  Site site(std::size_t index) const;
  std::size_t index(std::span<const int> site) const;
  bool contains(std::span<const int> site) const noexcept;

  friend bool operator==(const BoxGeometry&, const BoxGeometry&) = default;

 private:
  int dimension_;
  int sites_per_side_;
  std::size_t volume_;
  std::vector<std::size_t> strides_;
};

std::vector<Site> enumerate_sites(const BoxGeometry& geometry);

/// <x> = sqrt(1 + |x|^2), Euclidean norm.
double japanese_bracket(std::span<const int> site) noexcept;

/// iid single-site distribution. Only the uniform family exists for now.
class PotentialSpec {
 public:
  enum class Family { uniform };

  /// uniform(a, b); throws std::invalid_argument unless a < b (both finite).
  static PotentialSpec uniform(double lower, double upper);

  Family family() const noexcept { return family_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  /// ||rho||_inf of the density.
  double density_sup() const noexcept { return 1.0 / (upper_ - lower_); }

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

 private:
  PotentialSpec(Family family, double lower, double upper)
      : family_(family), lower_(lower), upper_(upper) {}

  Family family_;
  double lower_;
  double upper_;
};

/// One value per site from the counter stream of `seed`; value k depends only
/// on (seed, k).
std::vector<double> sample_potential(const PotentialSpec& spec,
                                     const BoxGeometry& geometry,
                                     std::uint64_t seed);

/// Real symmetric matrix stored as its lower triangle (row-packed).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t order);

  std::size_t order() const noexcept { return order_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return packed_[slot(i, j)];
  }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    packed_[slot(i, j)] = value;
  }
  void add(std::size_t i, std::size_t j, double value) noexcept {
    packed_[slot(i, j)] += value;
  }

  /// y = H x.
  std::vector<double> apply(std::span<const double> x) const;
  /// Row-major dense copy with both triangles filled.
  std::vector<double> to_dense() const;

  double trace() const noexcept;
  double frobenius_norm() const noexcept;

  /// Number of stored (i >= j) entries that are exactly nonzero.
  std::size_t stored_nonzeros() const noexcept;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  static std::size_t slot(std::size_t i, std::size_t j) noexcept {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  std::size_t order_ = 0;
  std::vector<double> packed_;
};

/// H(x,x) = V(x), H(x,y) = -1 for in-box nearest neighbours, 0 otherwise.
/// Throws std::invalid_argument if potential.size() != volume.
SymmetricMatrix build_hamiltonian(const BoxGeometry& geometry,
                                  std::span<const double> potential);

/// Indices (in host indexing) of the sites of the inner box, ascending.
std::vector<std::size_t> inner_site_indices(const BoxGeometry& host,
                                            int inner_sites_per_side);

/// chi_L H chi_L as a matrix of the inner box's own order and indexing.
SymmetricMatrix restrict_to_inner(const SymmetricMatrix& host_matrix,
                                  const BoxGeometry& host,
                                  int inner_sites_per_side);

struct Splitting {
  SymmetricMatrix inner;     ///< H_L  = chi_L H chi_L
  SymmetricMatrix outer;     ///< H_L^perp = (1 - chi_L) H (1 - chi_L)
  SymmetricMatrix coupling;  ///< Gamma_L = H - H_L - H_L^perp
};

/// Splits a host-box operator; all three parts keep host order and entries
/// are copied, so inner + outer + coupling == H exactly.
/// Throws std::invalid_argument if the inner box does not fit in the host.
Splitting build_splitting(const BoxGeometry& host, int inner_sites_per_side,
                          const SymmetricMatrix& host_matrix);
Splitting build_splitting(const BoxGeometry& host, int inner_sites_per_side,
                          std::span<const double> potential);

}  // namespace anderson
