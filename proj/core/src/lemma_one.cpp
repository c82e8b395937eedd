// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/lemma_one.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "anderson/spectral_stats.hpp"

namespace anderson {

namespace {

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void require_host_vector(std::span<const double> phi, const BoxGeometry& host, const char* who) {
  if (phi.size() != host.volume())
    throw std::invalid_argument(std::string(who) + ": vector length != host volume");
}

std::vector<double> restrict_vector(std::span<const double> phi, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = phi[idx[i]];
  return out;
}

// Largest eigenvalue of [[a, b], [b, c]].
double largest_eigenvalue_2x2(double a, double b, double c) noexcept {
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  return mean + std::hypot(half, b);
}

}  // namespace

bool DecayCertificate::holds_for(std::span<const double> phi) const {
  if (phi.size() != verified_on.volume()) return false;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double envelope = constant * std::pow(japanese_bracket(verified_on.site(k)), -beta);
    // Equality is attained at the maximizing site; allow one rounding step.
    if (std::abs(phi[k]) > envelope * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
      return false;
  }
  return true;
}

DecayCertificate certify_decay(std::span<const double> phi, const BoxGeometry& geometry,
                               double beta) {
  require_host_vector(phi, geometry, "certify_decay");
  if (std::abs(norm2(phi) - 1.0) > 1e-10)
    throw std::invalid_argument("certify_decay: phi must be normalized");
  DecayCertificate cert;
  cert.beta = beta;
  cert.verified_on = geometry;
  for (std::size_t k = 0; k < phi.size(); ++k)
    cert.constant = std::max(cert.constant,
                             std::abs(phi[k]) * std::pow(japanese_bracket(geometry.site(k)), beta));
  return cert;
}

double exponential_decay_rate(std::span<const double> phi, const BoxGeometry& geometry) {
  require_host_vector(phi, geometry, "exponential_decay_rate");
  const auto peak = static_cast<std::size_t>(
      std::max_element(phi.begin(), phi.end(),
                       [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      phi.begin());
  const double floor = 1e-13 * std::abs(phi[peak]);
  const Site x0 = geometry.site(peak);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!(std::abs(phi[k]) > floor)) continue;
    const Site x = geometry.site(k);
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) r2 += double(x[a] - x0[a]) * double(x[a] - x0[a]);
    const double r = std::sqrt(r2);
    const double y = std::log(std::abs(phi[k]));
    sx += r; sy += y; sxx += r * r; sxy += r * y; n += 1;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom <= 0.0) return 0.0;
  return -(n * sxy - sx * sy) / denom;
}

double decay_tail_sum(const BoxGeometry& host, int inner_sites_per_side, double beta) {
  const BoxGeometry inner(host.dimension(), inner_sites_per_side);
  double tail = 0.0;
  for (std::size_t k = 0; k < host.volume(); ++k) {
    const Site x = host.site(k);
    if (!inner.contains(x)) tail += std::pow(japanese_bracket(x), -2.0 * beta);
  }
  return tail;
}

double outer_shell_mass(std::span<const double> phi, const BoxGeometry& host) {
  require_host_vector(phi, host, "outer_shell_mass");
  const double half = 0.5 * (host.sites_per_side() - 1);
  double mass = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Site x = host.site(k);
    int sup = 0;
    for (int c : x) sup = std::max(sup, std::abs(c));
    if (sup > 0.9 * half) mass += phi[k] * phi[k];
  }
  return mass;
}

void Lemma1Config::validate(int dimension, bool full_theorem) const {
  const double d = dimension;
  if (!(beta > d / 2)) throw std::invalid_argument("Lemma1Config: need beta > d/2");
  if (full_theorem && !(beta > 2.5 * d))
    throw std::invalid_argument("Lemma1Config: the theorem chain needs beta > 5d/2");
  if (!(constant > 0.0)) throw std::invalid_argument("Lemma1Config: need C > 0");
  if (schedule.empty()) throw std::invalid_argument("Lemma1Config: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1) throw std::invalid_argument("Lemma1Config: sizes must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw std::invalid_argument("Lemma1Config: schedule must be strictly increasing");
  }
}

double Lemma1Config::epsilon(int inner_sites_per_side, int dimension) const {
  return constant * std::pow(static_cast<double>(inner_sites_per_side), -beta + 0.5 * dimension);
}

TruncationNorms truncation_norms(std::span<const double> phi, const BoxGeometry& host,
                                 int inner_sites_per_side) {
  require_host_vector(phi, host, "truncation_norms");
  const BoxGeometry inner(host.dimension(), inner_sites_per_side);
  double in = 0.0, out = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k)
    (inner.contains(host.site(k)) ? in : out) += phi[k] * phi[k];
  return {std::sqrt(in), std::sqrt(out)};
}

double truncated_overlap(std::span<const double> phi1, std::span<const double> phi2,
                         const BoxGeometry& host, int inner_sites_per_side) {
  require_host_vector(phi1, host, "truncated_overlap");
  require_host_vector(phi2, host, "truncated_overlap");
  const auto idx = inner_site_indices(host, inner_sites_per_side);
  double s = 0.0;
  for (std::size_t k : idx) s += phi1[k] * phi2[k];
  return s;
}

BoundaryDefect boundary_defect(const SymmetricMatrix& host_matrix, const BoxGeometry& host,
                               double energy, std::span<const double> phi,
                               int inner_sites_per_side) {
  require_host_vector(phi, host, "boundary_defect");
  const auto idx = inner_site_indices(host, inner_sites_per_side);

  // Left side on the inner box alone.
  const SymmetricMatrix h_inner = restrict_to_inner(host_matrix, host, inner_sites_per_side);
  const auto phi_inner = restrict_vector(phi, idx);
  auto lhs = h_inner.apply(phi_inner);
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= energy * phi_inner[i];

  // Right side on the host through the splitting.
  const Splitting parts = build_splitting(host, inner_sites_per_side, host_matrix);
  std::vector<double> phi_perp(phi.begin(), phi.end());
  for (std::size_t k : idx) phi_perp[k] = 0.0;
  const auto gamma_perp = restrict_vector(parts.coupling.apply(phi_perp), idx);
  auto h_phi = host_matrix.apply(phi);
  for (std::size_t k = 0; k < h_phi.size(); ++k) h_phi[k] -= energy * phi[k];
  const auto eig_defect = restrict_vector(h_phi, idx);

  BoundaryDefect out;
  out.defect = norm2(lhs);
  out.gamma_form = norm2(gamma_perp);
  out.leakage = norm2(eig_defect);
  double gap = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double diff = lhs[i] - (eig_defect[i] - gamma_perp[i]);
    gap += diff * diff;
  }
  out.identity_gap = std::sqrt(gap);
  return out;
}

bool SpanPair::independent() const noexcept {
  return gram11 > 0.0 && gram22 > 0.0 && gram_determinant() > 1e-14 * gram11 * gram22;
}

std::pair<std::vector<double>, std::vector<double>> SpanPair::orthonormal_basis() const {
  if (!independent())
    throw LinearDependenceError("truncated pair is linearly dependent (Gram determinant " +
                                std::to_string(gram_determinant()) + ")");
  std::vector<double> e1 = inner1, e2 = inner2;
  const double n1 = norm2(e1);
  for (double& v : e1) v /= n1;
  for (int pass = 0; pass < 2; ++pass) {
    const double c = dot(e1, e2);
    for (std::size_t i = 0; i < e2.size(); ++i) e2[i] -= c * e1[i];
  }
  const double n2 = norm2(e2);
  for (double& v : e2) v /= n2;
  return {std::move(e1), std::move(e2)};
}

SpanPair make_span_pair(std::span<const double> phi1, std::span<const double> phi2,
                        const BoxGeometry& host, int inner_sites_per_side) {
  require_host_vector(phi1, host, "make_span_pair");
  require_host_vector(phi2, host, "make_span_pair");
  const auto idx = inner_site_indices(host, inner_sites_per_side);
  SpanPair pair;
  pair.phi1.assign(phi1.begin(), phi1.end());
  pair.phi2.assign(phi2.begin(), phi2.end());
  pair.inner1 = restrict_vector(phi1, idx);
  pair.inner2 = restrict_vector(phi2, idx);
  pair.gram11 = dot(pair.inner1, pair.inner1);
  pair.gram12 = dot(pair.inner1, pair.inner2);
  pair.gram22 = dot(pair.inner2, pair.inner2);
  return pair;
}

namespace {

std::vector<double> shifted_apply(const SymmetricMatrix& h, std::span<const double> x, double e) {
  auto y = h.apply(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= e * x[i];
  return y;
}

}  // namespace

double span_defect(const SpanPair& pair, const SymmetricMatrix& inner_matrix, double energy) {
  if (inner_matrix.order() != pair.inner1.size())
    throw std::invalid_argument("span_defect: inner matrix order mismatch");
  const auto [e1, e2] = pair.orthonormal_basis();
  const auto m1 = shifted_apply(inner_matrix, e1, energy);
  const auto m2 = shifted_apply(inner_matrix, e2, energy);
  const double top = largest_eigenvalue_2x2(dot(m1, m1), dot(m1, m2), dot(m2, m2));
  return std::sqrt(std::max(top, 0.0));
}

ProjectionReport projection_argument(const EigenDecomposition& dec,
                                     const SymmetricMatrix& inner_matrix, const SpanPair& pair,
                                     double energy, double eps, double defect) {
  if (!(defect <= 2.0 * eps))
    throw PreconditionError("projection step refused: span defect " + std::to_string(defect) +
                            " exceeds 2 eps = " + std::to_string(2.0 * eps));
  if (!dec.has_vectors() || dec.order() != inner_matrix.order())
    throw std::invalid_argument("projection_argument: decomposition does not match H_L");
  const auto [e1, e2] = pair.orthonormal_basis();
  const Interval window = Interval::centered(energy, 3.0 * eps);
  const std::size_t m = dec.order();

  std::vector<double> p1(m, 0.0), p2(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (!window.contains(dec.eigenvalues[k])) continue;
    const auto v = dec.vector(k);
    const double c1 = dot(v, e1), c2 = dot(v, e2);
    for (std::size_t i = 0; i < m; ++i) {
      p1[i] += c1 * v[i];
      p2[i] += c2 * v[i];
    }
  }
  std::vector<double> q1(m), q2(m);
  for (std::size_t i = 0; i < m; ++i) {
    q1[i] = e1[i] - p1[i];
    q2[i] = e2[i] - p2[i];
  }
  const auto hq1 = shifted_apply(inner_matrix, q1, energy);
  const auto hq2 = shifted_apply(inner_matrix, q2, energy);

  ProjectionReport rep;
  rep.p_ratio_min = std::numeric_limits<double>::infinity();
  std::vector<double> q(m), p(m), hq(m);
  for (int s = 0; s < kProjectionSweepSamples; ++s) {
    const double theta = std::numbers::pi * s / kProjectionSweepSamples;
    const double c = std::cos(theta), sn = std::sin(theta);
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = c * q1[i] + sn * q2[i];
      p[i] = c * p1[i] + sn * p2[i];
      hq[i] = c * hq1[i] + sn * hq2[i];
    }
    const double qn = norm2(q), pn = norm2(p);  // psi is a unit vector
    rep.q_ratio_max = std::max(rep.q_ratio_max, qn);
    rep.p_ratio_min = std::min(rep.p_ratio_min, pn);
    rep.pythagoras_defect = std::max(rep.pythagoras_defect, std::abs(pn * pn + qn * qn - 1.0));
    if (3.0 * eps * qn > norm2(hq) + 1e-12) rep.q_bound_holds = false;
  }
  rep.q_ratio_exact =
      std::sqrt(std::max(0.0, largest_eigenvalue_2x2(dot(q1, q1), dot(q1, q2), dot(q2, q2))));
  rep.count_in_3eps = count_in_interval(dec, window);
  return rep;
}

Lemma1Instance synthetic_instance(const BoxGeometry& host, double beta, double energy,
                                  const PotentialSpec& base, std::uint64_t seed) {
  const std::size_t m = host.volume();
  std::vector<double> phi1(m), phi2(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Site x = host.site(k);
    const double bracket = japanese_bracket(x);
    phi1[k] = std::pow(bracket, -beta);
    phi2[k] = x[0] * std::pow(bracket, -beta - 1.0);
  }
  const double n1 = norm2(phi1);
  for (double& v : phi1) v /= n1;
  for (int pass = 0; pass < 2; ++pass) {
    const double c = dot(phi1, phi2);
    for (std::size_t k = 0; k < m; ++k) phi2[k] -= c * phi1[k];
  }
  const double n2 = norm2(phi2);
  if (!(n2 > 0.0)) throw std::invalid_argument("synthetic_instance: host box too small");
  for (double& v : phi2) v /= n2;

  const SymmetricMatrix a = build_hamiltonian(host, sample_potential(base, host, seed));
  const auto a1 = a.apply(phi1);
  const auto a2 = a.apply(phi2);
  const double c11 = dot(phi1, a1), c22 = dot(phi2, a2);
  const double c12 = 0.5 * (dot(phi1, a2) + dot(phi2, a1));

  // H = A - P A - A P + P A P + E P with P the projector onto the pair.
  Lemma1Instance inst;
  inst.host = host;
  inst.energy = energy;
  inst.hamiltonian = SymmetricMatrix(m);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y <= x; ++y) {
      double v = a(x, y);
      v -= phi1[x] * a1[y] + a1[x] * phi1[y] + phi2[x] * a2[y] + a2[x] * phi2[y];
      v += c11 * phi1[x] * phi1[y] + c22 * phi2[x] * phi2[y] +
           c12 * (phi1[x] * phi2[y] + phi2[x] * phi1[y]);
      v += energy * (phi1[x] * phi1[y] + phi2[x] * phi2[y]);
      inst.hamiltonian.set(x, y, v);
    }
  inst.phi1 = std::move(phi1);
  inst.phi2 = std::move(phi2);
  for (const auto* phi : {&inst.phi1, &inst.phi2}) {
    const auto hphi = shifted_apply(inst.hamiltonian, *phi, energy);
    inst.eigen_residual = std::max(inst.eigen_residual, norm2(hphi));
    inst.max_shell_mass = std::max(inst.max_shell_mass, outer_shell_mass(*phi, host));
  }
  inst.second_energy = dot(inst.phi2, inst.hamiltonian.apply(inst.phi2));
  inst.host_gate_passed = true;  // exact eigenvectors by construction
  return inst;
}

Lemma1Instance anderson_instance(const BoxGeometry& host, const PotentialSpec& potential,
                                 std::uint64_t seed, double target) {
  Lemma1Instance inst;
  inst.host = host;
  inst.hamiltonian = build_hamiltonian(host, sample_potential(potential, host, seed));
  const EigenDecomposition dec = symmetric_eigen(inst.hamiltonian);
  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < dec.order(); ++k)
    if (outer_shell_mass(dec.vector(k), host) < 1e-8) candidates.push_back(k);
  if (candidates.size() < 2)
    throw PreconditionError("anderson_instance: fewer than two eigenvectors pass the shell gate");
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(dec.eigenvalues[a] - target) < std::abs(dec.eigenvalues[b] - target);
  });
  const std::size_t first = candidates[0], second = candidates[1];
  inst.energy = dec.eigenvalues[first];
  inst.second_energy = dec.eigenvalues[second];
  const auto v1 = dec.vector(first);
  const auto v2 = dec.vector(second);
  inst.phi1.assign(v1.begin(), v1.end());
  inst.phi2.assign(v2.begin(), v2.end());
  for (const auto* phi : {&inst.phi1, &inst.phi2}) {
    inst.eigen_residual =
        std::max(inst.eigen_residual, norm2(shifted_apply(inst.hamiltonian, *phi, inst.energy)));
    inst.max_shell_mass = std::max(inst.max_shell_mass, outer_shell_mass(*phi, host));
  }
  inst.host_gate_passed = inst.max_shell_mass < 1e-8;
  return inst;
}

double certified_constant(const Lemma1Instance& instance, double beta,
                          std::span<const int> schedule) {
  const double c_phi = std::max(certify_decay(instance.phi1, instance.host, beta).constant,
                                certify_decay(instance.phi2, instance.host, beta).constant);
  const double d = instance.host.dimension();
  double k = 0.0;
  for (int l : schedule)
    k = std::max(k, std::sqrt(decay_tail_sum(instance.host, l, beta)) *
                        std::pow(static_cast<double>(l), beta - 0.5 * d));
  return c_phi * k;
}

std::vector<Lemma1Row> lemma1_experiment(const Lemma1Config& config,
                                         const Lemma1Instance& instance) {
  const int d = instance.host.dimension();
  config.validate(d);
  const double energy = config.energy;
  std::vector<Lemma1Row> rows;
  for (int l : config.schedule) {
    Lemma1Row row;
    row.inner_sites = l;
    row.eps = config.epsilon(l, d);
    row.j_width = 6.0 * row.eps;
    try {
      if (l > instance.host.sites_per_side())
        throw std::invalid_argument("inner box larger than host");
      const double scale = std::pow(static_cast<double>(l), -config.beta + 0.5 * d);
      const auto t1 = truncation_norms(instance.phi1, instance.host, l);
      const auto t2 = truncation_norms(instance.phi2, instance.host, l);
      row.outer_norm_max = std::max(t1.outer_norm, t2.outer_norm);
      row.inner_norm_min = std::min(t1.inner_norm, t2.inner_norm);
      row.eq1 = row.outer_norm_max <= row.eps &&
                row.inner_norm_min >= std::sqrt(std::max(0.0, 1.0 - row.eps * row.eps));
      row.overlap = truncated_overlap(instance.phi1, instance.phi2, instance.host, l);
      row.eq2 = std::abs(row.overlap) <= row.eps * row.eps;

      const auto b1 = boundary_defect(instance.hamiltonian, instance.host, energy, instance.phi1, l);
      const auto b2 = boundary_defect(instance.hamiltonian, instance.host, energy, instance.phi2, l);
      row.defect_max = std::max(b1.defect, b2.defect);
      row.gamma_form_max = std::max(b1.gamma_form, b2.gamma_form);
      row.eq3 = row.defect_max <= row.eps;

      const double c_eq1 = row.outer_norm_max / scale;
      const double c_eq2 = std::sqrt(std::abs(row.overlap)) / scale;
      const double c_eq3 = row.defect_max / scale;
      row.c_required = std::max({c_eq1, c_eq2, c_eq3});

      const SpanPair pair = make_span_pair(instance.phi1, instance.phi2, instance.host, l);
      row.independent = pair.independent();
      const SymmetricMatrix h_inner = restrict_to_inner(instance.hamiltonian, instance.host, l);
      const EigenDecomposition dec = symmetric_eigen(h_inner);
      row.count = count_in_interval(dec, Interval::centered(energy, 3.0 * row.eps));

      row.span_defect = span_defect(pair, h_inner, energy);
      row.c_required = std::max(row.c_required, row.span_defect / (2.0 * scale));
      row.eq4 = row.span_defect <= 2.0 * row.eps;

      const auto proj = projection_argument(dec, h_inner, pair, energy, row.eps, row.span_defect);
      row.q_ratio_max = proj.q_ratio_max;
      row.q_ratio_exact = proj.q_ratio_exact;
      row.p_ratio_min = proj.p_ratio_min;
      row.eq5 = proj.q_ratio_exact <= 2.0 / 3.0 && proj.q_ratio_max <= 2.0 / 3.0 &&
                proj.q_bound_holds;
      row.eq6 = proj.p_ratio_min * proj.p_ratio_min >= 5.0 / 9.0 - 1e-12;
      row.eq7 = proj.count_in_3eps >= 2;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<int> lemma1_threshold(std::span<const Lemma1Row> rows) {
  std::optional<int> threshold;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (!it->all_flags()) break;
    threshold = it->inner_sites;
  }
  return threshold;
}

std::size_t lemma1_contradictions(std::span<const Lemma1Row> rows) {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const Lemma1Row& r) {
    return r.hypotheses() && !(r.eq5 && r.eq6 && r.eq7);
  }));
}

}  // namespace anderson
