// Copyright 2026 The ndmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded randomized property battery.
//
// Each family is a function of (rng, max_dim) returning the worst residual of
// one trial. Trial t of family f draws from the stream derive_seed(seed, f, t),
// so families and trials are independent of each other and of their order.
// Checks that compare booleans contribute 0 on agreement and 1 on mismatch.
// An exception inside a trial counts as an infinite residual.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ndmm/example_models.hpp"
#include "ndmm/linalg.hpp"
#include "ndmm/measurement_model.hpp"
#include "ndmm/nd_channel.hpp"
#include "ndmm/nondisturbing.hpp"
#include "ndmm/quantum_objects.hpp"
#include "ndmm/random.hpp"

namespace ndmm {

// ---------------------------------------------------------------------------
// Random nondisturbing objects.

inline Context random_context(Eigen::Index dim, Rng& rng) { return Context(random_unitary(dim, rng)); }

inline ProbeDecomposition random_probe_decomposition(const Context& ctx, Eigen::Index dimK, Rng& rng) {
  ProbeDecomposition pd{ctx, {}};
  for (Eigen::Index i = 0; i < ctx.dim(); ++i) pd.probes.push_back(random_ginibre(dimK, dimK, rng));
  return pd;
}

/// Every row is an independent random channel on K with `kraus_count` terms.
inline NDChannel random_nd_channel(const Context& ctx, Eigen::Index dimK, int kraus_count, Rng& rng) {
  NDChannel::Table table;
  for (Eigen::Index i = 0; i < ctx.dim(); ++i) table.push_back(random_kraus_channel(dimK, kraus_count, rng));
  return NDChannel(ctx, std::move(table));
}

/// Single-term table of random unitaries V_i.
inline NDChannel random_unitary_nd_channel(const Context& ctx, Eigen::Index dimK, Rng& rng) {
  NDChannel::Table table;
  for (Eigen::Index i = 0; i < ctx.dim(); ++i) table.push_back({random_unitary(dimK, rng)});
  return NDChannel(ctx, std::move(table));
}

inline Observable random_observable(Eigen::Index dim, int count, Rng& rng) {
  return Observable::from_matrices(random_povm(dim, count, rng));
}

/// Random ND measurement model with dimH, dimK in [2, max_dim], up to 3 Kraus
/// terms per row and 2..3 probe outcomes.
inline MeasurementModel random_nd_model(Rng& rng, int max_dim, bool unitary = false) {
  const int hi = std::max(2, max_dim);
  const Eigen::Index dimH = rng.uniform_int(2, hi);
  const Eigen::Index dimK = rng.uniform_int(2, hi);
  const Context ctx = random_context(dimH, rng);
  NDChannel nd = unitary ? random_unitary_nd_channel(ctx, dimK, rng)
                         : random_nd_channel(ctx, dimK, rng.uniform_int(1, 3), rng);
  State eta(random_density(dimK, rng));
  return MeasurementModel(dimH, std::move(eta), std::move(nd), random_observable(dimK, rng.uniform_int(2, 3), rng));
}

// ---------------------------------------------------------------------------
// Independent oracles.

namespace oracle {

inline CVec kron_vec(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// B_i from matrix elements: sum_{k,l} <psi_i (x) phi_k, A psi_i (x) phi_l> |phi_k><phi_l|
/// for an orthonormal basis {phi_k} of K given as the columns of `kbasis`.
inline CMat probe_by_basis(const CMat& a, const CVec& psi, const CMat& kbasis) {
  const Eigen::Index k = kbasis.rows();
  CMat b = CMat::Zero(k, k);
  for (Eigen::Index p = 0; p < k; ++p) {
    const CVec u = kron_vec(psi, kbasis.col(p));
    for (Eigen::Index q = 0; q < k; ++q) {
      const CVec v = kron_vec(psi, kbasis.col(q));
      const Complex coeff = u.dot(a * v);
      b += coeff * outer(kbasis.col(p), kbasis.col(q));
    }
  }
  return b;
}

/// sum_k S_k m S_k^*.
inline CMat apply_kraus(const std::vector<CMat>& kraus, const CMat& m) {
  CMat out = CMat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const CMat& s : kraus) out += s * m * s.adjoint();
  return out;
}

/// Operator-level effect test: Hermitian with spectrum in [0, 1].
inline bool is_effect(const CMat& a, Tolerance tol) {
  if (!is_hermitian(a, tol)) return false;
  const RVec ev = hermitian_eig(a, tol).values;
  return ev(0) >= -tol.atol && ev(ev.size() - 1) <= 1.0 + tol.atol;
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Property families.

namespace families {

inline double mismatch(bool a, bool b) { return a == b ? 0.0 : 1.0; }

inline Eigen::Index draw_dim(Rng& rng, int max_dim) { return rng.uniform_int(2, std::max(2, max_dim)); }

/// Kronecker/partial-trace identities, PSD square root and superoperator action.
inline double linalg(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const CMat a = random_ginibre(n, n, rng);
  const CMat b = random_ginibre(k, k, rng);
  const CMat ab = kron(a, b);
  double r = max_abs_diff(partial_trace(ab, n, k, TraceOut::K), b.trace() * a);
  r = std::max(r, max_abs_diff(partial_trace(ab, n, k, TraceOut::H), a.trace() * b));
  const CMat p = random_density(n, rng);
  const CMat root = psd_sqrt(p);
  r = std::max(r, max_abs_diff(root * root, p));
  const std::vector<CMat> kraus = random_kraus_channel(n, 2, rng);
  const CMat image = unvec(superoperator(kraus) * vec(p), n, n);
  r = std::max(r, max_abs_diff(image, oracle::apply_kraus(kraus, p)));
  return r;
}

/// extract(assemble(B)) = B, assemble(extract(A)) = A, and the matrix-element
/// formula agrees with the partial-trace formula in two random bases of K.
inline double probe_round_trip(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const Context ctx = random_context(n, rng);
  const ProbeDecomposition pd = random_probe_decomposition(ctx, k, rng);
  const CMat a = assemble(pd);
  double r = commutator_defect(a, ctx, k);
  const ProbeDecomposition back = extract_probes(a, ctx, k);
  for (std::size_t i = 0; i < pd.probes.size(); ++i) r = std::max(r, max_abs_diff(back.probes[i], pd.probes[i]));
  r = std::max(r, max_abs_diff(assemble(back), a));
  return r;
}

inline double basis_independence(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const Context ctx = random_context(n, rng);
  const CMat a = assemble(random_probe_decomposition(ctx, k, rng));
  const CMat basis1 = random_unitary(k, rng);
  const CMat basis2 = random_unitary(k, rng);
  const ProbeDecomposition pd = extract_probes(a, ctx, k);
  double r = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const CMat b1 = oracle::probe_by_basis(a, ctx.vector(i), basis1);
    const CMat b2 = oracle::probe_by_basis(a, ctx.vector(i), basis2);
    r = std::max({r, max_abs_diff(b1, b2), max_abs_diff(b1, pd.probes[static_cast<std::size_t>(i)])});
  }
  return r;
}

/// tr_H(A) = sum B_i and tr_K(A) = sum tr(B_i) P_i against the direct partial trace.
inline double partial_traces(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const ProbeDecomposition pd = random_probe_decomposition(random_context(n, rng), k, rng);
  const CMat a = assemble(pd);
  const PartialTraces pt = partial_traces_closed_form(pd);
  return std::max(max_abs_diff(pt.over_h, partial_trace(a, n, k, TraceOut::H)),
                  max_abs_diff(pt.over_k, partial_trace(a, n, k, TraceOut::K)));
}

/// Probe families that do (positive) or do not (negative) have each property.
struct ClassifyInstances {
  std::vector<CMat> self_adjoint[2];
  std::vector<CMat> unitary[2];
  std::vector<CMat> projection[2];
  std::vector<CMat> effect[2];
  std::vector<CMat> observable[2];
};

inline CMat random_projection(Eigen::Index k, Rng& rng) {
  const CMat u = random_unitary(k, rng);
  const int rank = rng.uniform_int(0, static_cast<int>(k));
  CMat p = CMat::Zero(k, k);
  for (int c = 0; c < rank; ++c) p += outer(u.col(c), u.col(c));
  return p;
}

/// Hermitian with one eigenvalue outside [0, 1].
inline CMat random_non_effect(Eigen::Index k, Rng& rng) {
  const CMat u = random_unitary(k, rng);
  RVec spectrum(k);
  for (Eigen::Index i = 0; i < k; ++i) spectrum(i) = rng.uniform();
  spectrum(0) = rng.uniform() < 0.5 ? -0.1 - rng.uniform() : 1.1 + rng.uniform();
  return u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
}

inline ClassifyInstances classify_instances(Eigen::Index n, Eigen::Index k, Rng& rng) {
  ClassifyInstances c;
  // The negative family breaks the property in one randomly chosen slot.
  const auto bad = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool flip = static_cast<std::size_t>(i) == bad;
    c.self_adjoint[1].push_back(random_hermitian(k, rng));
    c.self_adjoint[0].push_back(flip ? CMat(random_ginibre(k, k, rng)) : random_hermitian(k, rng));
    c.unitary[1].push_back(random_unitary(k, rng));
    c.unitary[0].push_back(flip ? CMat(rng.uniform(1.1, 2.0) * random_unitary(k, rng)) : random_unitary(k, rng));
    c.projection[1].push_back(random_projection(k, rng));
    c.projection[0].push_back(flip ? random_effect(k, rng) : random_projection(k, rng));
    c.effect[1].push_back(random_effect(k, rng));
    c.effect[0].push_back(flip ? random_non_effect(k, rng) : random_effect(k, rng));
  }
  c.observable[1] = random_povm(k, static_cast<int>(n), rng);
  c.observable[0] = random_povm(k, static_cast<int>(n), rng);
  if (rng.uniform() < 0.5) {
    c.observable[0][bad] *= 0.5;  // effects, but no longer summing to I
  } else {
    c.observable[0][bad] = random_non_effect(k, rng);
  }
  return c;
}

/// Flags from the probes against operator-level predicates on A, for one
/// positive and one negative instance of every property.
inline double classify_agreement(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const Context ctx = random_context(n, rng);
  const ClassifyInstances inst = classify_instances(n, k, rng);
  const Tolerance tol{};
  double r = 0.0;
  const auto run = [&](const std::vector<CMat>& probes, bool expected, auto flag, auto direct) {
    const ProbeDecomposition pd{ctx, probes};
    const CMat a = assemble(pd);
    const bool d = direct(a);
    r += mismatch(flag(classify(pd, tol)), d) + mismatch(d, expected);
  };
  for (int sign = 0; sign < 2; ++sign) {
    const bool expected = sign == 1;
    run(inst.self_adjoint[sign], expected, [](const ProbeFlags& f) { return f.self_adjoint; },
        [&](const CMat& a) { return is_hermitian(a, tol); });
    run(inst.unitary[sign], expected, [](const ProbeFlags& f) { return f.unitary; },
        [&](const CMat& a) { return is_unitary(a, tol); });
    run(inst.projection[sign], expected, [](const ProbeFlags& f) { return f.projection; },
        [&](const CMat& a) { return is_projection(a, tol); });
    run(inst.effect[sign], expected, [](const ProbeFlags& f) { return f.effect; },
        [&](const CMat& a) { return oracle::is_effect(a, tol); });
    run(inst.observable[sign], expected, [](const ProbeFlags& f) { return f.observable_family; },
        [&](const CMat& a) {
          return oracle::is_effect(a, tol) && max_abs(partial_trace(a, n, k, TraceOut::H) - identity(k)) <= tol.atol;
        });
  }
  return r;
}

/// A <= D iff B_i <= C_i, with D built above or below A in one slot.
inline double order(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const Context ctx = random_context(n, rng);
  ProbeDecomposition a{ctx, {}};
  for (Eigen::Index i = 0; i < n; ++i) a.probes.push_back(random_hermitian(k, rng));
  double r = 0.0;
  for (int sign = 0; sign < 2; ++sign) {
    ProbeDecomposition d{ctx, {}};
    for (const CMat& b : a.probes) d.probes.push_back(b + random_density(k, rng));
    if (sign == 0) {
      const auto bad = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
      d.probes[bad] = a.probes[bad] - random_density(k, rng);
    }
    const bool via_probes = order_leq_via_probes(a, d);
    const bool direct = loewner_leq(assemble(a), assemble(d));
    r += mismatch(via_probes, direct) + mismatch(direct, sign == 1);
  }
  return r;
}

/// A (B (x) D) A^* closed form against the direct product.
inline double conjugation(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const ProbeDecomposition pd = random_probe_decomposition(random_context(n, rng), k, rng);
  const CMat a = assemble(pd);
  const CMat b = random_ginibre(n, n, rng);
  const CMat d = random_ginibre(k, k, rng);
  return max_abs_diff(conjugate(pd, b, d), a * kron(b, d) * a.adjoint());
}

/// Adjoints and products stay nondisturbing with the expected probes.
inline double closure(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const Context ctx = random_context(n, rng);
  const ProbeDecomposition a = random_probe_decomposition(ctx, k, rng);
  const ProbeDecomposition d = random_probe_decomposition(ctx, k, rng);
  const CMat prod = assemble(a) * assemble(d);
  return std::max({max_abs_diff(assemble(adjoint_probes(a)), assemble(a).adjoint()),
                   max_abs_diff(assemble(product_probes(a, d)), prod), commutator_defect(prod, ctx, k)});
}

/// table -> Kraus -> table at the superoperator level, commutator tests on
/// every S_k, and invariance under unitary mixing of the Kraus operators.
inline double channel_round_trip(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const Context ctx = random_context(n, rng);
  const int terms = rng.uniform_int(1, 3);
  const NDChannel nd = random_nd_channel(ctx, k, terms, rng);
  const std::vector<CMat> kraus = nd.kraus_operators();
  double r = 0.0;
  for (const CMat& s : kraus) r = std::max(r, commutator_defect(s, ctx, k));
  const NDChannel back = nd_channel_from_kraus(kraus, ctx, k);
  r = std::max(r, max_abs_diff(back.superoperator(), nd.superoperator()));
  const CMat u = random_unitary(terms, rng);
  std::vector<CMat> mixed;
  for (int p = 0; p < terms; ++p) {
    CMat s = CMat::Zero(n * k, n * k);
    for (int q = 0; q < terms; ++q) s += u(p, q) * kraus[static_cast<std::size_t>(q)];
    mixed.push_back(std::move(s));
  }
  r = std::max(r, max_abs_diff(nd_channel_from_kraus(mixed, ctx, k).superoperator(), nd.superoperator()));
  return r;
}

/// nu(rho (x) eta) from the table against the Kraus sum.
inline double product_action(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const NDChannel nd = random_nd_channel(random_context(n, rng), k, rng.uniform_int(1, 3), rng);
  const State rho(random_density(n, rng));
  const State eta(random_density(k, rng));
  const CMat direct = oracle::apply_kraus(nd.kraus_operators(), kron(rho.matrix(), eta.matrix()));
  return max_abs_diff(apply_product(nd, rho, eta), direct);
}

inline double product_partial_traces(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const NDChannel nd = random_nd_channel(random_context(n, rng), k, rng.uniform_int(1, 3), rng);
  const State rho(random_density(n, rng));
  const State eta(random_density(k, rng));
  const CMat direct = oracle::apply_kraus(nd.kraus_operators(), kron(rho.matrix(), eta.matrix()));
  const ProductPartialTraces pt = partial_traces_product(nd, rho, eta);
  return std::max(max_abs_diff(pt.over_k, partial_trace(direct, n, k, TraceOut::K)),
                  max_abs_diff(pt.over_h, partial_trace(direct, n, k, TraceOut::H)));
}

/// Closed-form measured instrument (plain, superoperator and Kraus forms)
/// against the direct route; probabilities non-negative and summing to 1.
inline double instrument(Rng& rng, int max_dim) {
  const MeasurementModel mm = random_nd_model(rng, max_dim);
  const State rho(random_density(mm.dimH(), rng));
  const Eigen::Index n = mm.dimH();
  double r = 0.0;
  double total = 0.0;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    const std::string& label = mm.probe().label(x);
    const CMat direct = measured_instrument_direct(mm, label, rho);
    r = std::max(r, max_abs_diff(measured_instrument_nd(mm, label, rho), direct));
    r = std::max(r, max_abs_diff(unvec(measured_instrument_superoperator(mm, label) * vec(rho.matrix()), n, n), direct));
    r = std::max(r, max_abs_diff(measured_instrument_kraus(mm, label).apply(rho.matrix()), direct));
    const double p = direct.trace().real();
    r = std::max({r, -p, std::abs(direct.trace().imag())});
    r = std::max(r, -min_eigenvalue(0.5 * (instrument_coefficients(mm, x) + instrument_coefficients(mm, x).adjoint())));
    total += p;
  }
  return std::max(r, std::abs(total - 1.0));
}

/// Closed-form measured observable against the dual route; completeness,
/// pairwise commutativity and diagonality in the context.
inline double observable(Rng& rng, int max_dim) {
  const MeasurementModel mm = random_nd_model(rng, max_dim);
  const Observable closed = measured_observable_nd(mm);
  const Observable direct = measured_observable_direct(mm);
  CMat total = CMat::Zero(mm.dimH(), mm.dimH());
  double r = 0.0;
  for (std::size_t x = 0; x < closed.size(); ++x) {
    r = std::max(r, max_abs_diff(closed.effect(x), direct.effect(x)));
    r = std::max(r, mm.nd().context().measurability_defect(closed.effect(x)));
    for (std::size_t y = x + 1; y < closed.size(); ++y) {
      r = std::max(r, max_abs(commutator(closed.effect(x), closed.effect(y))));
    }
    total += closed.effect(x);
  }
  return std::max(r, max_abs(total - identity(mm.dimH())));
}

/// Post-interaction probe instrument and observable against the direct
/// square-root sandwich.
inline double post_probe(Rng& rng, int max_dim) {
  const MeasurementModel mm = random_nd_model(rng, max_dim);
  const State rho(random_density(mm.dimH(), rng));
  const State sigma(random_density(mm.dimK(), rng));
  const Observable obs = post_probe_observable(mm, rho);
  CMat total = CMat::Zero(mm.dimK(), mm.dimK());
  double r = 0.0;
  double trace = 0.0;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    const std::string& label = mm.probe().label(x);
    const CMat direct = post_probe_instrument_direct(mm, rho, label, sigma);
    const CMat closed = post_probe_instrument_nd(mm, rho, label, sigma);
    r = std::max(r, max_abs_diff(closed, direct));
    r = std::max(r, std::abs((sigma.matrix() * obs.effect(x)).trace() - closed.trace()));
    total += obs.effect(x);
    trace += direct.trace().real();
  }
  return std::max({r, max_abs(total - identity(mm.dimK())), std::abs(trace - 1.0)});
}

/// tr[Gamma_i(sigma) F] = tr[sigma Gamma_i^*(F)] and tr[rho M_x] = tr I_x(rho).
inline double duality(Rng& rng, int max_dim) {
  const MeasurementModel mm = random_nd_model(rng, max_dim);
  const NDChannel& nd = mm.nd();
  const State rho(random_density(mm.dimH(), rng));
  const CMat sigma = random_density(mm.dimK(), rng);
  const CMat f = random_effect(mm.dimK(), rng);
  double r = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(mm.dimH()); ++i) {
    const GammaChannel g = nd.gamma(i);
    r = std::max(r, std::abs((g.apply(sigma) * f).trace() - (sigma * g.apply_dual(f)).trace()));
    r = std::max(r, max_abs(g.apply_dual(identity(mm.dimK())) - identity(mm.dimK())));
  }
  const Observable m = measured_observable_nd(mm);
  for (std::size_t x = 0; x < m.size(); ++x) {
    const CMat inst = measured_instrument_nd(mm, m.label(x), rho);
    r = std::max(r, std::abs((rho.matrix() * m.effect(x)).trace() - inst.trace()));
  }
  return r;
}

/// Single-unitary tables: the coefficients reduce to tr(V_i eta V_j^* F_x),
/// the post-probe observable to sum_i w_i V_i^* F_x V_i, and the remeasured
/// coefficients to tr[(V_i V_j) eta (V_i V_j)^* F_x].
inline double unitary_specialization(Rng& rng, int max_dim) {
  const MeasurementModel mm = random_nd_model(rng, max_dim, /*unitary=*/true);
  const NDChannel& nd = mm.nd();
  const Context& ctx = nd.context();
  const Eigen::Index n = mm.dimH();
  const CMat& eta = mm.eta().matrix();
  const State rho(random_density(n, rng));
  const Observable post = post_probe_observable(mm, rho);
  const Observable remeasured = remeasure(mm, rho);
  double r = 0.0;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    const CMat& fx = mm.probe().effect(x);
    const CMat c = instrument_coefficients(mm, x);
    CMat post_expected = CMat::Zero(mm.dimK(), mm.dimK());
    CMat remeasure_expected = CMat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const CMat& vi = nd.probe(static_cast<std::size_t>(i), 0);
      const double w = ctx.diagonal_element(rho.matrix(), i).real();
      post_expected += w * vi.adjoint() * fx * vi;
      for (Eigen::Index j = 0; j < n; ++j) {
        const CMat& vj = nd.probe(static_cast<std::size_t>(j), 0);
        r = std::max(r, std::abs(c(i, j) - (vi * eta * vj.adjoint() * fx).trace()));
        const CMat vv = vi * vj;
        remeasure_expected += (vv * eta * vv.adjoint() * fx).trace() * w * ctx.atom(j);
      }
    }
    r = std::max(r, max_abs_diff(post.effect(x), post_expected));
    r = std::max(r, max_abs_diff(remeasured.effect(x), remeasure_expected));
  }
  return r;
}

/// eta = I/dimK with a unitary table: M_x = tr(eta F_x) I_H.
inline double commuting_eta(Rng& rng, int max_dim) {
  const Eigen::Index n = draw_dim(rng, max_dim);
  const Eigen::Index k = draw_dim(rng, max_dim);
  const NDChannel nd = random_unitary_nd_channel(random_context(n, rng), k, rng);
  const State eta(identity(k) / static_cast<double>(k));
  const MeasurementModel mm(n, eta, nd, random_observable(k, rng.uniform_int(2, 3), rng));
  const Observable m = measured_observable_nd(mm);
  double r = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x) {
    r = std::max(r, max_abs_diff(m.effect(x), (eta.matrix() * mm.probe().effect(x)).trace().real() * identity(n)));
  }
  return r;
}

/// Remeasurement closed form against substituting the post-probe observable
/// for F in the measured-observable formula, and completeness of the result.
inline double remeasurement(Rng& rng, int max_dim) {
  const MeasurementModel mm = random_nd_model(rng, max_dim);
  const State rho(random_density(mm.dimH(), rng));
  const Observable closed = remeasure(mm, rho);
  const Observable substituted = measured_observable_nd(state_dependent_model(mm, apparatus_from_mm(mm), rho));
  CMat total = CMat::Zero(mm.dimH(), mm.dimH());
  double r = 0.0;
  for (std::size_t x = 0; x < closed.size(); ++x) {
    r = std::max(r, max_abs_diff(closed.effect(x), substituted.effect(x)));
    total += closed.effect(x);
  }
  return std::max(r, max_abs(total - identity(mm.dimH())));
}

/// Swap model: probe recovery, channel display, instrument and observable
/// closed forms, and the sharp-probe observable.
inline double swap_example(Rng& rng, int max_dim) {
  const int n = rng.uniform_int(2, std::max(2, max_dim));
  const MeasurementModel mm = build_swap_mm({n, random_observable(n, rng.uniform_int(2, 3), rng), std::nullopt});
  const NDChannel& nd = mm.nd();
  const CMat u = nd.kraus_operators().front();
  const Context ctx = Context::standard(n);
  double r = commutator_defect(u, ctx, n);
  const ProbeDecomposition pd = extract_probes(u, ctx, n);
  for (int i = 0; i < n; ++i) {
    r = std::max(r, max_abs_diff(pd.probes[static_cast<std::size_t>(i)], swap_operator(n, i)));
  }
  const State rho(random_density(n, rng));
  r = std::max(r, max_abs_diff(apply_product(nd, rho, mm.eta()), swap_channel_closed_form(rho.matrix())));
  const Observable m = measured_observable_nd(mm);
  for (std::size_t x = 0; x < m.size(); ++x) {
    const CMat& fx = mm.probe().effect(x);
    r = std::max(r, max_abs_diff(m.effect(x), swap_observable_closed_form(fx)));
    r = std::max(r, max_abs_diff(measured_instrument_direct(mm, m.label(x), rho),
                                 swap_instrument_closed_form(fx, rho.matrix())));
  }
  const Observable sharp = measured_observable_nd(mm.with_probe(sharp_probe(n)));
  for (int x = 0; x < n; ++x) {
    r = std::max(r, max_abs_diff(sharp.effect(static_cast<std::size_t>(x)), ctx.atom(x)));
  }
  return r;
}

/// Fourier model for m prime and n < m: trace identity, instrument and
/// observable closed forms, and the average-eigenvalue collapse for diagonal F.
inline double fourier_example(Rng& rng, int max_dim) {
  static constexpr int kPrimes[] = {3, 5, 7};
  const int m = kPrimes[rng.uniform_int(0, 2)];
  const int n = rng.uniform_int(1, std::min(m - 1, std::max(2, max_dim)));
  const MeasurementModel mm = build_fourier_mm({n, m, random_observable(m, rng.uniform_int(2, 3), rng), std::nullopt});
  const CMat& eta = mm.eta().matrix();
  const State rho(random_density(n, rng));
  double r = 0.0;
  const Observable obs = measured_observable_nd(mm);
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    const CMat& fx = mm.probe().effect(x);
    for (int j = 1; j <= n; ++j) {
      for (int k = 1; k <= n; ++k) {
        const CMat vj = fourier_operator(m, j);
        const CMat vk = fourier_operator(m, k);
        r = std::max(r, std::abs(fourier_trace_coefficient(fx, j, k) - (vj * eta * vk.adjoint() * fx).trace()));
      }
    }
    r = std::max(r, max_abs_diff(measured_instrument_direct(mm, mm.probe().label(x), rho),
                                 fourier_instrument_closed_form(fx, rho.matrix())));
    r = std::max(r, max_abs_diff(obs.effect(x), fourier_observable_closed_form(fx, n)));
  }
  // Diagonal probe: spectra drawn as a random partition of unity.
  const int outcomes = rng.uniform_int(2, 3);
  std::vector<CMat> diag(static_cast<std::size_t>(outcomes), CMat::Zero(m, m));
  for (int s = 0; s < m; ++s) {
    std::vector<double> w(static_cast<std::size_t>(outcomes));
    for (double& v : w) v = rng.uniform() + 1e-3;
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (int x = 0; x < outcomes; ++x) diag[static_cast<std::size_t>(x)](s, s) = w[static_cast<std::size_t>(x)] / sum;
  }
  const Observable diag_obs = measured_observable_nd(mm.with_probe(Observable::from_matrices(diag)));
  for (int x = 0; x < outcomes; ++x) {
    const CMat& fx = diag[static_cast<std::size_t>(x)];
    r = std::max(r, max_abs_diff(diag_obs.effect(static_cast<std::size_t>(x)), average_eigenvalue(fx) * identity(n)));
  }
  return r;
}

}  // namespace families

// ---------------------------------------------------------------------------
// Suite driver.

using FamilyFn = std::function<double(Rng&, int)>;

struct Family {
  std::string name;
  FamilyFn run;
};

/// Every family, sorted by name; this is the reporting order.
inline const std::vector<Family>& all_families() {
  static const std::vector<Family> list = [] {
    std::vector<Family> v{
        {"basis_independence", families::basis_independence},
        {"channel_round_trip", families::channel_round_trip},
        {"classify", families::classify_agreement},
        {"closure", families::closure},
        {"commuting_eta", families::commuting_eta},
        {"conjugation", families::conjugation},
        {"duality", families::duality},
        {"fourier_example", families::fourier_example},
        {"instrument", families::instrument},
        {"linalg", families::linalg},
        {"observable", families::observable},
        {"order", families::order},
        {"partial_traces", families::partial_traces},
        {"post_probe", families::post_probe},
        {"probe_round_trip", families::probe_round_trip},
        {"product_action", families::product_action},
        {"product_partial_traces", families::product_partial_traces},
        {"remeasurement", families::remeasurement},
        {"swap_example", families::swap_example},
        {"unitary_specialization", families::unitary_specialization},
    };
    std::sort(v.begin(), v.end(), [](const Family& a, const Family& b) { return a.name < b.name; });
    return v;
  }();
  return list;
}

inline const Family& find_family(const std::string& name) {
  for (const Family& f : all_families()) {
    if (f.name == name) return f;
  }
  throw std::invalid_argument("unknown verify family '" + name + "'");
}

struct FamilyResult {
  std::string name;
  int trials = 0;
  double max_residual = 0.0;
  bool pass = false;
  std::string first_error;  // message of the first exception, if any
};

inline FamilyResult run_family(const Family& family, std::uint64_t seed, int trials, int max_dim, double tol) {
  FamilyResult res{family.name, trials, 0.0, true, {}};
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, family.name, static_cast<std::uint64_t>(t)));
    double r = 0.0;
    try {
      r = family.run(rng, max_dim);
    } catch (const std::exception& e) {
      r = std::numeric_limits<double>::infinity();
      if (res.first_error.empty()) res.first_error = "trial " + std::to_string(t) + ": " + e.what();
    }
    if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
    res.max_residual = std::max(res.max_residual, r);
  }
  res.pass = res.max_residual <= tol;
  return res;
}

struct VerifySummary {
  std::uint64_t seed = 0;
  int trials = 0;
  int max_dim = 0;
  double tol = 0.0;
  std::vector<FamilyResult> families;
  bool pass = true;
  std::string text;
};

inline std::string format_summary(const VerifySummary& s) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "ndmm verify seed=%llu trials=%d max_dim=%d tol=%.3e\n",
                static_cast<unsigned long long>(s.seed), s.trials, s.max_dim, s.tol);
  os << line;
  for (const FamilyResult& f : s.families) {
    std::snprintf(line, sizeof line, "%-24s trials=%-5d max_residual=%-12.6e %s\n", f.name.c_str(), f.trials,
                  f.max_residual, f.pass ? "PASS" : "FAIL");
    os << line;
    if (!f.first_error.empty()) os << "  error: " << f.first_error << '\n';
  }
  const auto failed = std::count_if(s.families.begin(), s.families.end(), [](const FamilyResult& f) { return !f.pass; });
  os << (s.pass ? "PASS" : "FAIL") << ": " << (s.families.size() - static_cast<std::size_t>(failed)) << "/"
     << s.families.size() << " families within tolerance\n";
  return os.str();
}

/// Runs every family. Throws std::invalid_argument for trials < 1 or
/// max_dim < 2; numerical failures are reported in the summary, not thrown.
inline VerifySummary verify_suite(std::uint64_t seed, int trials, int max_dim, double tol) {
  if (trials < 1) throw std::invalid_argument("verify: trials must be at least 1");
  if (max_dim < 2) throw std::invalid_argument("verify: max-dim must be at least 2");
  if (!(tol > 0.0)) throw std::invalid_argument("verify: tol must be positive");
  VerifySummary s{seed, trials, max_dim, tol, {}, true, {}};
  for (const Family& f : all_families()) {
    s.families.push_back(run_family(f, seed, trials, max_dim, tol));
    s.pass = s.pass && s.families.back().pass;
  }
  s.text = format_summary(s);
  return s;
}

}  // namespace ndmm
