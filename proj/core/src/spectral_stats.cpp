// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anderson {

Interval::Interval(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!(lower <= upper)) throw std::invalid_argument("Interval: need lower <= upper");
}

Interval Interval::centered(double center, double half_width) {
  if (!(half_width >= 0.0)) throw std::invalid_argument("Interval: negative half-width");
  return Interval(center - half_width, center + half_width);
}

std::size_t count_in_interval(std::span<const double> eigenvalues, const Interval& j) {
  const auto lo = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), j.lower());
  const auto hi = std::upper_bound(lo, eigenvalues.end(), j.upper());
  return static_cast<std::size_t>(hi - lo);
}

std::optional<double> min_gap(std::span<const double> eigenvalues, const Interval& i) {
  const auto lo = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), i.lower());
  const auto hi = std::upper_bound(lo, eigenvalues.end(), i.upper());
  if (hi - lo < 2) return std::nullopt;
  double gap = *(lo + 1) - *lo;
  for (auto it = lo + 1; it + 1 < hi; ++it) gap = std::min(gap, *(it + 1) - *it);
  return gap;
}

namespace {

void require_vectors(const EigenDecomposition& d, const char* who) {
  if (!d.has_vectors()) throw std::invalid_argument(std::string(who) + ": eigenvectors required");
}

void require_positive_eta(double eta, const char* who) {
  if (!(eta > 0.0)) throw std::invalid_argument(std::string(who) + ": eta must be > 0");
}

std::vector<double> lorentz_weights(std::span<const double> eigenvalues, double energy,
                                    double eta) {
  std::vector<double> w(eigenvalues.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double t = eigenvalues[k] - energy;
    w[k] = eta / (t * t + eta * eta);
  }
  return w;
}

// Kahan's 2x2 determinant a*d - b*c with one rounding error in b*c removed.
double det2(double a, double b, double c, double d) noexcept {
  const double bc = b * c;
  const double err = std::fma(-b, c, bc);
  return std::fma(a, d, -bc) + err;
}

}  // namespace

std::complex<double> green_function(const EigenDecomposition& d, std::complex<double> z,
                                    std::size_t x, std::size_t y) {
  require_vectors(d, "green_function");
  if (!(z.imag() > 0.0)) throw std::invalid_argument("green_function: Im z must be > 0");
  if (x >= d.order() || y >= d.order()) throw std::out_of_range("green_function: site index");
  std::complex<double> g = 0.0;
  for (std::size_t k = 0; k < d.order(); ++k) {
    const auto v = d.vector(k);
    g += v[x] * v[y] / (d.eigenvalues[k] - z);
  }
  return g;
}

double im_resolvent_trace(std::span<const double> eigenvalues, double energy, double eta) {
  require_positive_eta(eta, "im_resolvent_trace");
  double t = 0.0;
  for (double w : lorentz_weights(eigenvalues, energy, eta)) t += w;
  return t;
}

SymmetricMatrix im_resolvent_matrix(const EigenDecomposition& d, double energy, double eta) {
  require_vectors(d, "im_resolvent_matrix");
  require_positive_eta(eta, "im_resolvent_matrix");
  const std::size_t m = d.order();
  const auto w = lorentz_weights(d.eigenvalues, energy, eta);
  // Scale columns by sqrt(w) and form B B^T, which is PSD by construction.
  DenseMatrix b(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = std::sqrt(w[k]);
    const auto v = d.vector(k);
    auto col = b.column(k);
    for (std::size_t i = 0; i < m; ++i) col[i] = s * v[i];
  }
  SymmetricMatrix im(m);
  std::vector<double> acc(m);
  for (std::size_t x = 0; x < m; ++x) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const auto col = b.column(k);
      const double bx = col[x];
      for (std::size_t y = 0; y <= x; ++y) acc[y] += bx * col[y];
    }
    for (std::size_t y = 0; y <= x; ++y) im.set(x, y, acc[y]);
  }
  return im;
}

double im_green_det2(const EigenDecomposition& d, double energy, double eta, std::size_t x,
                     std::size_t y) {
  require_vectors(d, "im_green_det2");
  require_positive_eta(eta, "im_green_det2");
  if (x >= d.order() || y >= d.order()) throw std::out_of_range("im_green_det2: site index");
  const auto w = lorentz_weights(d.eigenvalues, energy, eta);
  double gxx = 0.0, gyy = 0.0, gxy = 0.0;
  for (std::size_t k = 0; k < d.order(); ++k) {
    const auto v = d.vector(k);
    gxx += w[k] * v[x] * v[x];
    gyy += w[k] * v[y] * v[y];
    gxy += w[k] * v[x] * v[y];
  }
  return det2(gxx, gxy, gxy, gyy);
}

Det2Total det2_im_green_total(const EigenDecomposition& d, double energy, double eta) {
  const auto im = im_resolvent_matrix(d, energy, eta);
  const std::size_t m = im.order();
  Det2Total out;
  // The (x, x) terms vanish identically; off-diagonal (x, y) and (y, x) coincide.
  out.min_summand = 0.0;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < x; ++y) {
      const double g = im(x, y);
      const double det = det2(im(x, x), g, g, im(y, y));
      out.total += 2.0 * det;
      out.min_summand = std::min(out.min_summand, det);
    }
  return out;
}

bool ChainReport::pair_bound_holds() const noexcept {
  return static_cast<double>(factorial_moment) <= resolvent_pair_sum + 1e-12 * (1.0 + resolvent_pair_sum);
}

bool ChainReport::identity_holds() const noexcept {
  return std::abs(trace_form - determinant_form) <= 1e-8 * (1.0 + std::abs(trace_form));
}

ChainReport chain_report(const EigenDecomposition& d, const Interval& j, bool with_determinant) {
  const double energy = j.center();
  const double eta = j.half_width();
  ChainReport rep;
  const std::size_t m = d.order();

  // Distinct ordered index pairs inside J.
  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < m; ++k)
    if (j.contains(d.eigenvalues[k])) inside.push_back(k);
  rep.count = inside.size();
  for (std::size_t a : inside)
    for (std::size_t b : inside) rep.factorial_moment += (a != b);

  if (!(eta > 0.0)) return rep;  // degenerate J: resolvent forms undefined, left at 0

  std::vector<double> major(m);
  for (std::size_t k = 0; k < m; ++k) major[k] = resolvent_majorant(d.eigenvalues[k], energy, eta);
  // Direct double sum over k != l.
  for (std::size_t k = 0; k < m; ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < m; ++l)
      if (l != k) row += major[l];
    rep.resolvent_pair_sum += major[k] * row;
  }

  const auto w = lorentz_weights(d.eigenvalues, energy, eta);
  double tr = 0.0, tr2 = 0.0;
  for (double wk : w) {
    tr += wk;
    tr2 += wk * wk;
  }
  const double scale = 4.0 * eta * eta;
  rep.trace_form = scale * (tr * tr - tr2);

  if (with_determinant) {
    const auto det = det2_im_green_total(d, energy, eta);
    rep.determinant_form = scale * det.total;
    rep.min_det2_summand = det.min_summand;
  }
  return rep;
}

}  // namespace anderson
