// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file eigensolver.hpp
 * @brief Dense real symmetric eigensolver: Householder reduction to
 *        tridiagonal form, then implicit QL with Wilkinson shifts.
 *
 * Cost is O(m^3) with eigenvectors and O(m^2) beyond the reduction without.
 * Inputs that are already tridiagonal (every 1d Hamiltonian) skip all
 * reflections, so their reduction is exact.
 */

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson/lattice_model.hpp"

namespace anderson {

/// Column-major dense matrix; column k is contiguous.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t order);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<double> column(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> column(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  ///< ascending
  DenseMatrix eigenvectors;         ///< column k pairs with eigenvalues[k]; empty if not computed

  std::size_t order() const noexcept { return eigenvalues.size(); }
  bool has_vectors() const noexcept { return !eigenvectors.empty(); }
  std::span<const double> vector(std::size_t k) const noexcept { return eigenvectors.column(k); }
};

/// Q^T H Q = T. `transform` is empty when accumulation was not requested.
struct Tridiagonal {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;  ///< size m-1 (0 for m = 1)
  DenseMatrix transform;
};

/// Raised when the QL iteration exceeds its sweep budget.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(std::size_t index)
      : std::runtime_error("implicit QL did not converge for eigenvalue index " +
                           std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Maximum implicit QL sweeps spent on any single eigenvalue.
inline constexpr int kMaxSweepsPerEigenvalue = 50;

Tridiagonal tridiagonalize(const SymmetricMatrix& h, bool accumulate_transform = true);

/// Diagonalizes T. If `transform` is nonempty, the returned vectors are
/// transform * (eigenvectors of T); otherwise no vectors are produced.
EigenDecomposition solve_tridiagonal(std::vector<double> diagonal,
                                     std::vector<double> off_diagonal,
                                     DenseMatrix transform = {});

/// Full eigendecomposition (values and orthonormal vectors).
EigenDecomposition symmetric_eigen(const SymmetricMatrix& h);

/// Eigenvalues only, ascending.
std::vector<double> symmetric_eigenvalues(const SymmetricMatrix& h);

struct ResidualReport {
  double max_residual = 0.0;             ///< max_k ||H v_k - lambda_k v_k||_2
  double max_orthogonality_defect = 0.0; ///< max_ij |<v_i, v_j> - delta_ij|
  double trace_defect = 0.0;             ///< |sum_k lambda_k - tr H|
};

ResidualReport residual_report(const SymmetricMatrix& h, const EigenDecomposition& decomposition);

/// True when the report is within the module tolerances:
/// residual <= 1e-10 (1 + ||H||_F), Gram defect <= 1e-12 m,
/// trace defect <= 1e-10 (1 + |tr H|).
bool within_tolerances(const SymmetricMatrix& h, const ResidualReport& report);

}  // namespace anderson
