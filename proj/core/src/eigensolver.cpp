// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace anderson {

DenseMatrix DenseMatrix::identity(std::size_t order) {
  DenseMatrix q(order, order);
  for (std::size_t i = 0; i < order; ++i) q(i, i) = 1.0;
  return q;
}

Tridiagonal tridiagonalize(const SymmetricMatrix& h, bool accumulate_transform) {
  const std::size_t m = h.order();
  Tridiagonal out;
  out.diagonal.assign(m, 0.0);
  out.off_diagonal.assign(m > 0 ? m - 1 : 0, 0.0);
  if (m == 0) return out;

  // Row-major working copy; the active block is the trailing submatrix.
  std::vector<double> a = h.to_dense();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * m + j]; };

  // Accumulated transform, row-major during the sweep.
  std::vector<double> q;
  if (accumulate_transform) {
    q.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) q[i * m + i] = 1.0;
  }

  std::vector<double> v(m), p(m);
  for (std::size_t k = 0; k + 2 < m; ++k) {
    const std::size_t r = m - k - 1;  // length of the column below the diagonal
    double tail = 0.0;
    for (std::size_t i = 1; i < r; ++i) tail += at(k + 1 + i, k) * at(k + 1 + i, k);
    const double head = at(k + 1, k);
    if (tail == 0.0) {
      out.off_diagonal[k] = head;
      continue;
    }
    const double alpha = -std::copysign(std::sqrt(head * head + tail), head);
    v[0] = head - alpha;
    for (std::size_t i = 1; i < r; ++i) v[i] = at(k + 1 + i, k);
    const double beta = 2.0 / (v[0] * v[0] + tail);

    // B <- (I - beta v v^T) B (I - beta v v^T) on the trailing block.
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = &a[(k + 1 + i) * m + k + 1];
      double s = 0.0;
      for (std::size_t j = 0; j < r; ++j) s += row[j] * v[j];
      p[i] = beta * s;
    }
    double kappa = 0.0;
    for (std::size_t i = 0; i < r; ++i) kappa += v[i] * p[i];
    kappa *= 0.5 * beta;
    for (std::size_t i = 0; i < r; ++i) p[i] -= kappa * v[i];
    for (std::size_t i = 0; i < r; ++i) {
      double* row = &a[(k + 1 + i) * m + k + 1];
      for (std::size_t j = 0; j < r; ++j) row[j] -= v[i] * p[j] + p[i] * v[j];
    }
    out.off_diagonal[k] = alpha;
    at(k + 1, k) = alpha;
    at(k, k + 1) = alpha;
    for (std::size_t i = 1; i < r; ++i) at(k + 1 + i, k) = at(k, k + 1 + i) = 0.0;

    if (accumulate_transform) {
      // Q <- Q (I - beta v v^T); only columns k+1.. are touched.
      for (std::size_t i = 0; i < m; ++i) {
        double* row = &q[i * m + k + 1];
        double s = 0.0;
        for (std::size_t j = 0; j < r; ++j) s += row[j] * v[j];
        s *= beta;
        if (s == 0.0) continue;
        for (std::size_t j = 0; j < r; ++j) row[j] -= s * v[j];
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) out.diagonal[i] = at(i, i);
  if (m >= 2) out.off_diagonal[m - 2] = at(m - 1, m - 2);

  if (accumulate_transform) {
    out.transform = DenseMatrix(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out.transform(i, j) = q[i * m + j];
  }
  return out;
}

EigenDecomposition solve_tridiagonal(std::vector<double> diagonal,
                                     std::vector<double> off_diagonal,
                                     DenseMatrix transform) {
  const std::size_t m = diagonal.size();
  if (m == 0) throw std::invalid_argument("solve_tridiagonal: empty matrix");
  if (off_diagonal.size() != m - 1)
    throw std::invalid_argument("solve_tridiagonal: off-diagonal must have m-1 entries");
  const bool vectors = !transform.empty();
  if (vectors && (transform.rows() != m || transform.cols() != m))
    throw std::invalid_argument("solve_tridiagonal: transform must be m x m");

  auto& d = diagonal;
  std::vector<double> e(m, 0.0);
  std::copy(off_diagonal.begin(), off_diagonal.end(), e.begin());
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < m; ++l) {
    int sweeps = 0;
    std::size_t mm;
    do {
      // Deflate at the first negligible off-diagonal at or beyond l.
      for (mm = l; mm + 1 < m; ++mm) {
        const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= eps * dd) break;
      }
      if (mm == l) break;
      if (sweeps++ == kMaxSweepsPerEigenvalue) throw ConvergenceError(l);

      // Wilkinson shift from the leading 2x2 block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = mm; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[mm] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (vectors) {
          double* zi = transform.column(i).data();
          double* zi1 = transform.column(i + 1).data();
          for (std::size_t k = 0; k < m; ++k) {
            f = zi1[k];
            zi1[k] = s * zi[k] + c * f;
            zi[k] = c * zi[k] - s * f;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[mm] = 0.0;
    } while (true);
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  EigenDecomposition out;
  out.eigenvalues.resize(m);
  for (std::size_t k = 0; k < m; ++k) out.eigenvalues[k] = d[order[k]];
  if (vectors) {
    out.eigenvectors = DenseMatrix(m, m);
    for (std::size_t k = 0; k < m; ++k) {
      auto src = transform.column(order[k]);
      std::copy(src.begin(), src.end(), out.eigenvectors.column(k).begin());
    }
  }
  return out;
}

EigenDecomposition symmetric_eigen(const SymmetricMatrix& h) {
  auto t = tridiagonalize(h, true);
  return solve_tridiagonal(std::move(t.diagonal), std::move(t.off_diagonal),
                           std::move(t.transform));
}

std::vector<double> symmetric_eigenvalues(const SymmetricMatrix& h) {
  auto t = tridiagonalize(h, false);
  return solve_tridiagonal(std::move(t.diagonal), std::move(t.off_diagonal)).eigenvalues;
}

ResidualReport residual_report(const SymmetricMatrix& h, const EigenDecomposition& dec) {
  const std::size_t m = h.order();
  if (dec.order() != m || !dec.has_vectors())
    throw std::invalid_argument("residual_report: decomposition does not match matrix");
  ResidualReport rep;
  for (std::size_t k = 0; k < m; ++k) {
    const auto v = dec.vector(k);
    const auto hv = h.apply(v);
    double r2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double diff = hv[i] - dec.eigenvalues[k] * v[i];
      r2 += diff * diff;
    }
    rep.max_residual = std::max(rep.max_residual, std::sqrt(r2));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const auto vi = dec.vector(i);
      const auto vj = dec.vector(j);
      const double g = std::inner_product(vi.begin(), vi.end(), vj.begin(), 0.0);
      rep.max_orthogonality_defect =
          std::max(rep.max_orthogonality_defect, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  const double sum = std::accumulate(dec.eigenvalues.begin(), dec.eigenvalues.end(), 0.0);
  rep.trace_defect = std::abs(sum - h.trace());
  return rep;
}

bool within_tolerances(const SymmetricMatrix& h, const ResidualReport& report) {
  const double m = static_cast<double>(h.order());
  return report.max_residual <= 1e-10 * (1.0 + h.frobenius_norm()) &&
         report.max_orthogonality_defect <= 1e-12 * m &&
         report.trace_defect <= 1e-10 * (1.0 + std::abs(h.trace()));
}

}  // namespace anderson
