// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/lattice_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "anderson/random_streams.hpp"

namespace anderson {

BoxGeometry::BoxGeometry(int dimension, int sites_per_side)
    : dimension_(dimension), sites_per_side_(sites_per_side), volume_(1) {
  if (dimension < 1) throw std::invalid_argument("BoxGeometry: dimension must be >= 1");
  if (sites_per_side < 1) throw std::invalid_argument("BoxGeometry: sites_per_side must be >= 1");
  const auto n = static_cast<std::size_t>(sites_per_side);
  for (int i = 0; i < dimension; ++i) {
    if (volume_ > std::numeric_limits<std::size_t>::max() / n)
      throw std::invalid_argument("BoxGeometry: volume overflows");
    volume_ *= n;
  }
  strides_.assign(static_cast<std::size_t>(dimension), 1);
  for (int axis = dimension - 2; axis >= 0; --axis)
    strides_[static_cast<std::size_t>(axis)] = strides_[static_cast<std::size_t>(axis) + 1] * n;
}

Site BoxGeometry::site(std::size_t index) const {
  if (index >= volume_) throw std::out_of_range("BoxGeometry::site: index out of range");
  Site x(static_cast<std::size_t>(dimension_));
  const auto n = static_cast<std::size_t>(sites_per_side_);
  for (int axis = 0; axis < dimension_; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    x[a] = static_cast<int>((index / strides_[a]) % n) + lowest_coordinate();
  }
  return x;
}

std::size_t BoxGeometry::index(std::span<const int> site) const {
  if (!contains(site)) throw std::out_of_range("BoxGeometry::index: site outside box");
  std::size_t k = 0;
  for (int axis = 0; axis < dimension_; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    k += static_cast<std::size_t>(site[a] - lowest_coordinate()) * strides_[a];
  }
  return k;
}

bool BoxGeometry::contains(std::span<const int> site) const noexcept {
  if (site.size() != static_cast<std::size_t>(dimension_)) return false;
  for (int c : site)
    if (c < lowest_coordinate() || c > highest_coordinate()) return false;
  return true;
}

std::vector<Site> enumerate_sites(const BoxGeometry& geometry) {
  std::vector<Site> sites;
  sites.reserve(geometry.volume());
  for (std::size_t k = 0; k < geometry.volume(); ++k) sites.push_back(geometry.site(k));
  return sites;
}

double japanese_bracket(std::span<const int> site) noexcept {
  double norm2 = 1.0;
  for (int c : site) norm2 += static_cast<double>(c) * static_cast<double>(c);
  return std::sqrt(norm2);
}

PotentialSpec PotentialSpec::uniform(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper))
    throw std::invalid_argument("PotentialSpec::uniform: need finite a < b");
  return PotentialSpec(Family::uniform, lower, upper);
}

std::vector<double> sample_potential(const PotentialSpec& spec,
                                     const BoxGeometry& geometry,
                                     std::uint64_t seed) {
  const CounterStream stream(seed);
  const double a = spec.lower();
  const double width = spec.upper() - spec.lower();
  std::vector<double> values(geometry.volume());
  for (std::size_t k = 0; k < values.size(); ++k)
    values[k] = a + width * stream.uniform(k);
  return values;
}

SymmetricMatrix::SymmetricMatrix(std::size_t order)
    : order_(order), packed_(order * (order + 1) / 2, 0.0) {}

std::vector<double> SymmetricMatrix::apply(std::span<const double> x) const {
  if (x.size() != order_) throw std::invalid_argument("SymmetricMatrix::apply: size mismatch");
  std::vector<double> y(order_, 0.0);
  for (std::size_t i = 0; i < order_; ++i) {
    const double* row = packed_.data() + i * (i + 1) / 2;
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      acc += row[j] * x[j];
      y[j] += row[j] * x[i];
    }
    y[i] += acc + row[i] * x[i];
  }
  return y;
}

std::vector<double> SymmetricMatrix::to_dense() const {
  std::vector<double> dense(order_ * order_);
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      dense[i * order_ + j] = dense[j * order_ + i] = (*this)(i, j);
  return dense;
}

double SymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < order_; ++i) t += (*this)(i, i);
  return t;
}

double SymmetricMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  return std::sqrt(s);
}

std::size_t SymmetricMatrix::stored_nonzeros() const noexcept {
  std::size_t count = 0;
  for (double v : packed_) count += (v != 0.0);
  return count;
}

SymmetricMatrix build_hamiltonian(const BoxGeometry& geometry,
                                  std::span<const double> potential) {
  if (potential.size() != geometry.volume())
    throw std::invalid_argument("build_hamiltonian: potential has " +
                                std::to_string(potential.size()) + " values, box has " +
                                std::to_string(geometry.volume()) + " sites");
  const std::size_t m = geometry.volume();
  const auto n = static_cast<std::size_t>(geometry.sites_per_side());
  SymmetricMatrix h(m);
  for (std::size_t k = 0; k < m; ++k) {
    h.set(k, k, potential[k]);
    for (int axis = 0; axis < geometry.dimension(); ++axis) {
      const std::size_t s = geometry.stride(axis);
      if ((k / s) % n + 1 < n) h.set(k + s, k, -1.0);
    }
  }
  return h;
}

namespace {

void check_inner_fits(const BoxGeometry& host, int inner_sites_per_side) {
  if (inner_sites_per_side < 1 || inner_sites_per_side > host.sites_per_side())
    throw std::invalid_argument("inner box of " + std::to_string(inner_sites_per_side) +
                                " sites per side does not fit a host of " +
                                std::to_string(host.sites_per_side()));
}

std::vector<char> inner_mask(const BoxGeometry& host, int inner_sites_per_side) {
  const BoxGeometry inner(host.dimension(), inner_sites_per_side);
  std::vector<char> mask(host.volume(), 0);
  for (std::size_t k = 0; k < host.volume(); ++k) mask[k] = inner.contains(host.site(k)) ? 1 : 0;
  return mask;
}

}  // namespace

std::vector<std::size_t> inner_site_indices(const BoxGeometry& host,
                                            int inner_sites_per_side) {
  check_inner_fits(host, inner_sites_per_side);
  const auto mask = inner_mask(host, inner_sites_per_side);
  std::vector<std::size_t> indices;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) indices.push_back(k);
  return indices;
}

SymmetricMatrix restrict_to_inner(const SymmetricMatrix& host_matrix,
                                  const BoxGeometry& host,
                                  int inner_sites_per_side) {
  if (host_matrix.order() != host.volume())
    throw std::invalid_argument("restrict_to_inner: matrix order != host volume");
  const auto idx = inner_site_indices(host, inner_sites_per_side);
  SymmetricMatrix inner(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) inner.set(i, j, host_matrix(idx[i], idx[j]));
  return inner;
}

Splitting build_splitting(const BoxGeometry& host, int inner_sites_per_side,
                          const SymmetricMatrix& host_matrix) {
  check_inner_fits(host, inner_sites_per_side);
  if (host_matrix.order() != host.volume())
    throw std::invalid_argument("build_splitting: matrix order != host volume");
  const auto mask = inner_mask(host, inner_sites_per_side);
  const std::size_t m = host.volume();
  Splitting parts{SymmetricMatrix(m), SymmetricMatrix(m), SymmetricMatrix(m)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = host_matrix(i, j);
      if (mask[i] && mask[j])
        parts.inner.set(i, j, v);
      else if (!mask[i] && !mask[j])
        parts.outer.set(i, j, v);
      else
        parts.coupling.set(i, j, v);
    }
  return parts;
}

Splitting build_splitting(const BoxGeometry& host, int inner_sites_per_side,
                          std::span<const double> potential) {
  return build_splitting(host, inner_sites_per_side, build_hamiltonian(host, potential));
}

}  // namespace anderson
