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

// Operators on H (x) K that commute with every P_{psi_i} (x) I_K for a context
// {P_{psi_i}} on H. Such an operator is block diagonal in the context,
// A = sum_i P_{psi_i} (x) B_i, and everything here is computed from the
// probe operators B_i acting on K.

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ndmm/linalg.hpp"
#include "ndmm/quantum_objects.hpp"

namespace ndmm {

/// Thrown when an operator fails the commutator test against a context.
class DisturbingOperatorError : public ValidationError {
 public:
  DisturbingOperatorError(const std::string& what, double commutator_norm)
      : ValidationError(what), commutator_norm_(commutator_norm) {}
  double commutator_norm() const noexcept { return commutator_norm_; }

 private:
  double commutator_norm_;
};

class ContextMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Context on H plus one probe operator per context vector.
struct ProbeDecomposition {
  Context context;
  std::vector<CMat> probes;

  Eigen::Index dimH() const noexcept { return context.dim(); }
  Eigen::Index dimK() const { return probes.at(0).rows(); }
};

namespace detail {

inline void check_probes(const ProbeDecomposition& pd, const char* who) {
  if (static_cast<Eigen::Index>(pd.probes.size()) != pd.context.dim()) {
    throw DimensionError(std::string(who) + ": " + std::to_string(pd.probes.size()) +
                         " probes for a context of dimension " +
                         std::to_string(pd.context.dim()));
  }
  const Eigen::Index k = pd.probes.front().rows();
  for (const CMat& b : pd.probes) {
    if (b.rows() != k || b.cols() != k) {
      throw DimensionError(std::string(who) + ": probe operators of inconsistent dimension");
    }
  }
}

inline CMat lifted_atom(const Context& c, Eigen::Index i, Eigen::Index dimK) {
  return kron(c.atom(i), identity(dimK));
}

}  // namespace detail

/// max_i ||A (P_i (x) I_K) - (P_i (x) I_K) A||_max
inline double commutator_defect(const CMat& a, const Context& c, Eigen::Index dimK) {
  if (dimK < 1 || a.rows() != c.dim() * dimK || a.cols() != a.rows()) {
    throw DimensionError("commutator_defect: operator " + dims_string(a) +
                         " does not act on a " + std::to_string(c.dim()) + "x" +
                         std::to_string(dimK) + " tensor product");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < c.dim(); ++i) {
    worst = std::max(worst, max_abs(commutator(a, detail::lifted_atom(c, i, dimK))));
  }
  return worst;
}

inline bool is_c_nondisturbing(const CMat& a, const Context& c, Eigen::Index dimK,
                               Tolerance tol = {}) {
  return commutator_defect(a, c, dimK) <= tol.atol;
}

/// A = sum_i P_{psi_i} (x) B_i.
inline CMat assemble(const ProbeDecomposition& pd) {
  detail::check_probes(pd, "assemble");
  const Eigen::Index n = pd.dimH();
  const Eigen::Index k = pd.dimK();
  CMat a = CMat::Zero(n * k, n * k);
  for (Eigen::Index i = 0; i < n; ++i) {
    a += kron(pd.context.atom(i), pd.probes[static_cast<std::size_t>(i)]);
  }
  return a;
}

/// Probe operators B_i = tr_H[A (P_{psi_i} (x) I_K)]. Rejects operators that
/// fail the commutator test, reporting the largest commutator norm.
inline ProbeDecomposition extract_probes(const CMat& a, const Context& c, Eigen::Index dimK,
                                         Tolerance tol = {}) {
  const double defect = commutator_defect(a, c, dimK);
  if (defect > tol.atol) {
    throw DisturbingOperatorError(
        "extract_probes: operator is not context-nondisturbing (max commutator norm " +
            std::to_string(defect) + ")",
        defect);
  }
  ProbeDecomposition pd{c, {}};
  pd.probes.reserve(static_cast<std::size_t>(c.dim()));
  for (Eigen::Index i = 0; i < c.dim(); ++i) {
    pd.probes.push_back(
        partial_trace(a * detail::lifted_atom(c, i, dimK), c.dim(), dimK, TraceOut::H));
  }
  return pd;
}

struct PartialTraces {
  CMat over_h;  // operator on K
  CMat over_k;  // operator on H
};

/// tr_H(A) = sum_i B_i and tr_K(A) = sum_i tr(B_i) P_{psi_i}.
inline PartialTraces partial_traces_closed_form(const ProbeDecomposition& pd) {
  detail::check_probes(pd, "partial_traces_closed_form");
  PartialTraces out{CMat::Zero(pd.dimK(), pd.dimK()), CMat::Zero(pd.dimH(), pd.dimH())};
  for (Eigen::Index i = 0; i < pd.dimH(); ++i) {
    const CMat& b = pd.probes[static_cast<std::size_t>(i)];
    out.over_h += b;
    out.over_k += b.trace() * pd.context.atom(i);
  }
  return out;
}

struct ProbeFlags {
  bool self_adjoint = false;
  bool unitary = false;
  bool projection = false;
  bool effect = false;
  bool observable_family = false;  // {B_i} is an observable on K

  // Properties of tr_K(A) = sum_i tr(B_i) P_{psi_i}, read off the traces.
  bool trk_self_adjoint = false;  // tr(B_i) real
  bool trk_unitary = false;       // |tr(B_i)| = 1
  bool trk_effect = false;        // 0 <= tr(B_i) <= 1
  bool trk_projection = false;    // tr(B_i) in {0, 1}
};

/// Structural flags of A computed from its probes alone.
inline ProbeFlags classify(const ProbeDecomposition& pd, Tolerance tol = {}) {
  detail::check_probes(pd, "classify");
  const Eigen::Index k = pd.dimK();
  ProbeFlags f{true, true, true, true, true, true, true, true, true};
  CMat total = CMat::Zero(k, k);
  for (const CMat& b : pd.probes) {
    const bool hermitian = is_hermitian(b, tol);
    f.self_adjoint = f.self_adjoint && hermitian;
    f.unitary = f.unitary && is_unitary(b, tol);
    f.projection = f.projection && is_projection(b, tol);
    if (hermitian) {
      const RVec ev = hermitian_eig(b, tol).values;
      f.effect = f.effect && ev(0) >= -tol.atol && ev(ev.size() - 1) <= 1.0 + tol.atol;
    } else {
      f.effect = false;
    }
    total += b;

    const Complex t = b.trace();
    const bool real = std::abs(t.imag()) <= tol.atol;
    f.trk_self_adjoint = f.trk_self_adjoint && real;
    f.trk_unitary = f.trk_unitary && std::abs(std::abs(t) - 1.0) <= tol.atol;
    f.trk_effect = f.trk_effect && real && t.real() >= -tol.atol && t.real() <= 1.0 + tol.atol;
    f.trk_projection = f.trk_projection && real &&
                       (std::abs(t.real()) <= tol.atol || std::abs(t.real() - 1.0) <= tol.atol);
  }
  f.observable_family = f.effect && max_abs(total - identity(k)) <= tol.atol;
  return f;
}

/// A <= D via the probes: B_i <= C_i for every i.
inline bool order_leq_via_probes(const ProbeDecomposition& a, const ProbeDecomposition& d,
                                 Tolerance tol = {}) {
  detail::check_probes(a, "order_leq_via_probes");
  detail::check_probes(d, "order_leq_via_probes");
  if (!(a.context == d.context)) {
    throw ContextMismatchError("order_leq_via_probes: decompositions use different contexts");
  }
  if (a.dimK() != d.dimK()) throw DimensionError("order_leq_via_probes: probe spaces differ");
  for (std::size_t i = 0; i < a.probes.size(); ++i) {
    if (!loewner_leq(a.probes[i], d.probes[i], tol)) return false;
  }
  return true;
}

/// A (B (x) D) A^* = sum_{i,j} P_{psi_i} B P_{psi_j} (x) B_i D B_j^*.
inline CMat conjugate(const ProbeDecomposition& pd, const CMat& b, const CMat& d) {
  detail::check_probes(pd, "conjugate");
  const Eigen::Index n = pd.dimH();
  const Eigen::Index k = pd.dimK();
  if (b.rows() != n || b.cols() != n || d.rows() != k || d.cols() != k) {
    throw DimensionError("conjugate: expected " + std::to_string(n) + "x" + std::to_string(n) +
                         " and " + std::to_string(k) + "x" + std::to_string(k) + " operands");
  }
  CMat out = CMat::Zero(n * k, n * k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CMat left = pd.probes[static_cast<std::size_t>(i)] * d;
    for (Eigen::Index j = 0; j < n; ++j) {
      out += kron(pd.context.atom(i) * b * pd.context.atom(j),
                  left * pd.probes[static_cast<std::size_t>(j)].adjoint());
    }
  }
  return out;
}

/// Probes of A^*: {B_i^*}.
inline ProbeDecomposition adjoint_probes(const ProbeDecomposition& pd) {
  ProbeDecomposition out{pd.context, {}};
  out.probes.reserve(pd.probes.size());
  for (const CMat& b : pd.probes) out.probes.push_back(b.adjoint());
  return out;
}

/// Probes of the product A D: {B_i C_i}.
inline ProbeDecomposition product_probes(const ProbeDecomposition& a,
                                         const ProbeDecomposition& d) {
  if (!(a.context == d.context)) {
    throw ContextMismatchError("product_probes: decompositions use different contexts");
  }
  ProbeDecomposition out{a.context, {}};
  for (std::size_t i = 0; i < a.probes.size(); ++i) {
    out.probes.push_back(a.probes[i] * d.probes.at(i));
  }
  return out;
}

}  // namespace ndmm
