// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Eigenvalues of a symmetric tridiagonal matrix by bisection on the Sturm
// sequence of its characteristic polynomial.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

/// Number of eigenvalues strictly below x.
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e,
                               double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i == 0 ? 0.0 : e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : off * off / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

inline std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d,
                                                   const std::vector<double>& e) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  lo -= 1.0;
  hi += 1.0;
  std::vector<double> out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(d, e, mid) > k) b = mid; else a = mid;
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

}  // namespace oracle
