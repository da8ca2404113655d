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

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ndmm/linalg.hpp"

namespace ndmm {

class UnknownLabelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operator a with 0 <= a <= I.
class Effect {
 public:
  explicit Effect(CMat m, Tolerance tol = {}) : m_(std::move(m)) {
    require_square(m_, "Effect");
    if (!all_finite(m_)) throw ValidationError("Effect: non-finite entry");
    if (!is_hermitian(m_, tol)) throw ValidationError("Effect: not Hermitian");
    const RVec ev = hermitian_eig(m_, tol).values;
    if (ev(0) < -tol.atol || ev(ev.size() - 1) > 1.0 + tol.atol) {
      throw ValidationError("Effect: spectrum [" + std::to_string(ev(0)) + ", " +
                            std::to_string(ev(ev.size() - 1)) + "] is outside [0, 1]");
    }
  }

  const CMat& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  CMat m_;
};

namespace detail {

inline void check_density(const CMat& m, Tolerance tol, bool require_unit_trace,
                          const char* who) {
  require_square(m, who);
  if (!all_finite(m)) throw ValidationError(std::string(who) + ": non-finite entry");
  if (!is_hermitian(m, tol)) throw ValidationError(std::string(who) + ": not Hermitian");
  const double lo = min_eigenvalue(m, tol);
  if (lo < -tol.atol) {
    throw NotPsdError(std::string(who) + ": not PSD (min eigenvalue " + std::to_string(lo) + ")",
                      lo);
  }
  const double tr = m.trace().real();
  if (require_unit_trace ? std::abs(tr - 1.0) > tol.atol : tr > 1.0 + tol.atol) {
    throw ValidationError(std::string(who) + ": trace " + std::to_string(tr) +
                          (require_unit_trace ? " != 1" : " > 1"));
  }
}

}  // namespace detail

/// Density operator with unit trace.
class State {
 public:
  explicit State(CMat m, Tolerance tol = {}) : m_(std::move(m)) {
    detail::check_density(m_, tol, true, "State");
  }
  const CMat& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  CMat m_;
};

/// PSD operator with trace at most one.
class PartialState {
 public:
  explicit PartialState(CMat m, Tolerance tol = {}) : m_(std::move(m)) {
    detail::check_density(m_, tol, false, "PartialState");
  }
  const CMat& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  CMat m_;
};

/// Finite family of labelled effects summing to the identity. Labels keep
/// their insertion order.
class Observable {
 public:
  struct Outcome {
    std::string label;
    Effect effect;
  };

  explicit Observable(std::vector<Outcome> outcomes, Tolerance tol = {})
      : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw ValidationError("Observable: no outcomes");
    std::unordered_set<std::string> seen;
    const Eigen::Index d = outcomes_.front().effect.dim();
    CMat total = CMat::Zero(d, d);
    for (const Outcome& o : outcomes_) {
      if (!seen.insert(o.label).second) {
        throw ValidationError("Observable: duplicate label '" + o.label + "'");
      }
      if (o.effect.dim() != d) throw DimensionError("Observable: effects of unequal dimension");
      total += o.effect.matrix();
    }
    const double defect = max_abs(total - identity(d));
    if (defect > tol.atol) {
      throw ValidationError("Observable: effects sum to I only within " + std::to_string(defect));
    }
  }

  /// Labels "0", "1", ... in order.
  static Observable from_matrices(const std::vector<CMat>& effects, Tolerance tol = {}) {
    std::vector<Outcome> outcomes;
    outcomes.reserve(effects.size());
    for (std::size_t x = 0; x < effects.size(); ++x) {
      outcomes.push_back({std::to_string(x), Effect(effects[x], tol)});
    }
    return Observable(std::move(outcomes), tol);
  }

  std::size_t size() const noexcept { return outcomes_.size(); }
  Eigen::Index dim() const noexcept { return outcomes_.front().effect.dim(); }
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  const std::string& label(std::size_t x) const { return outcomes_.at(x).label; }
  const CMat& effect(std::size_t x) const { return outcomes_.at(x).effect.matrix(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const Outcome& o : outcomes_) out.push_back(o.label);
    return out;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t x = 0; x < outcomes_.size(); ++x) {
      if (outcomes_[x].label == label) return x;
    }
    throw UnknownLabelError("unknown outcome label '" + label + "'");
  }

  const CMat& effect(const std::string& label) const { return effect(index_of(label)); }

 private:
  std::vector<Outcome> outcomes_;
};

/// Completely positive map in Kraus form, sum S_i^* S_i <= I. A channel
/// additionally has sum S_i^* S_i = I.
class KrausOperation {
 public:
  enum class Kind { Operation, Channel };

  explicit KrausOperation(std::vector<CMat> kraus, Kind kind = Kind::Operation,
                          Tolerance tol = {})
      : kraus_(std::move(kraus)), kind_(kind) {
    if (kraus_.empty()) throw ValidationError("KrausOperation: empty Kraus list");
    const Eigen::Index d = kraus_.front().rows();
    CMat total = CMat::Zero(d, d);
    for (const CMat& s : kraus_) {
      require_square(s, "KrausOperation");
      if (s.rows() != d) throw DimensionError("KrausOperation: Kraus operators of unequal size");
      if (!all_finite(s)) throw ValidationError("KrausOperation: non-finite entry");
      total += s.adjoint() * s;
    }
    if (kind_ == Kind::Channel) {
      const double defect = max_abs(total - identity(d));
      if (defect > tol.atol) {
        throw ValidationError("KrausOperation: sum S*S differs from I by " +
                              std::to_string(defect));
      }
    } else if (!loewner_leq(0.5 * (total + total.adjoint()), identity(d), tol)) {
      throw ValidationError("KrausOperation: sum S*S is not below I");
    }
  }

  static KrausOperation channel(std::vector<CMat> kraus, Tolerance tol = {}) {
    return KrausOperation(std::move(kraus), Kind::Channel, tol);
  }

  const std::vector<CMat>& kraus() const noexcept { return kraus_; }
  bool is_channel() const noexcept { return kind_ == Kind::Channel; }
  Eigen::Index dim() const noexcept { return kraus_.front().rows(); }

  /// sum_i S_i m S_i^* for an arbitrary matrix m (linear extension).
  CMat apply(const CMat& m) const {
    if (m.rows() != dim() || m.cols() != dim()) {
      throw DimensionError("KrausOperation::apply: operand " + dims_string(m) + " on dimension " +
                           std::to_string(dim()));
    }
    CMat out = CMat::Zero(dim(), dim());
    for (const CMat& s : kraus_) out += s * m * s.adjoint();
    return out;
  }

  /// sum_i S_i^* a S_i.
  CMat apply_dual(const CMat& a) const {
    if (a.rows() != dim() || a.cols() != dim()) {
      throw DimensionError("KrausOperation::apply_dual: operand " + dims_string(a) +
                           " on dimension " + std::to_string(dim()));
    }
    CMat out = CMat::Zero(dim(), dim());
    for (const CMat& s : kraus_) out += s.adjoint() * a * s;
    return out;
  }

  CMat superoperator() const { return ndmm::superoperator(kraus_); }

 private:
  std::vector<CMat> kraus_;
  Kind kind_;
};

/// Labelled operations whose sum is a channel.
class Instrument {
 public:
  struct Outcome {
    std::string label;
    KrausOperation operation;
  };

  explicit Instrument(std::vector<Outcome> outcomes, Tolerance tol = {})
      : outcomes_(std::move(outcomes)), tol_(tol) {
    if (outcomes_.empty()) throw ValidationError("Instrument: no outcomes");
    std::unordered_set<std::string> seen;
    std::vector<CMat> all;
    for (const Outcome& o : outcomes_) {
      if (!seen.insert(o.label).second) {
        throw ValidationError("Instrument: duplicate label '" + o.label + "'");
      }
      all.insert(all.end(), o.operation.kraus().begin(), o.operation.kraus().end());
    }
    // Throws unless the total operation is a channel.
    (void)KrausOperation::channel(std::move(all), tol);
  }

  std::size_t size() const noexcept { return outcomes_.size(); }
  Eigen::Index dim() const noexcept { return outcomes_.front().operation.dim(); }
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  const KrausOperation& operation(std::size_t x) const { return outcomes_.at(x).operation; }

  KrausOperation total_channel() const {
    std::vector<CMat> all;
    for (const Outcome& o : outcomes_) {
      all.insert(all.end(), o.operation.kraus().begin(), o.operation.kraus().end());
    }
    return KrausOperation::channel(std::move(all), tol_);
  }

 private:
  std::vector<Outcome> outcomes_;
  Tolerance tol_;
};

/// Orthonormal basis {psi_i} of H (the columns of `basis`) and its atoms
/// P_{psi_i} = |psi_i><psi_i|.
class Context {
 public:
  explicit Context(CMat basis, Tolerance tol = {}) : basis_(std::move(basis)) {
    require_square(basis_, "Context");
    if (!is_unitary(basis_, tol)) throw ValidationError("Context: basis is not orthonormal");
    atoms_.reserve(static_cast<std::size_t>(basis_.cols()));
    for (Eigen::Index i = 0; i < basis_.cols(); ++i) {
      atoms_.push_back(outer(basis_.col(i), basis_.col(i)));
    }
  }

  static Context standard(Eigen::Index n) { return Context(identity(n)); }

  Eigen::Index dim() const noexcept { return basis_.rows(); }
  const CMat& basis() const noexcept { return basis_; }
  CVec vector(Eigen::Index i) const { return basis_.col(i); }
  const CMat& atom(Eigen::Index i) const { return atoms_.at(static_cast<std::size_t>(i)); }
  const std::vector<CMat>& atoms() const noexcept { return atoms_; }

  /// <psi_i, m psi_i>
  Complex diagonal_element(const CMat& m, Eigen::Index i) const {
    return basis_.col(i).dot(m * basis_.col(i));
  }

  /// Largest off-diagonal entry of m in this basis; zero iff m = sum c_i P_{psi_i}.
  double measurability_defect(const CMat& m) const {
    CMat in_basis = basis_.adjoint() * m * basis_;
    in_basis.diagonal().setZero();
    return max_abs(in_basis);
  }

  bool is_measurable(const CMat& m, Tolerance tol = {}) const {
    return measurability_defect(m) <= tol.atol;
  }

  /// Dephasing sum_i P_{psi_i} m P_{psi_i}.
  CMat dephase(const CMat& m) const {
    CMat out = CMat::Zero(dim(), dim());
    for (const CMat& p : atoms_) out += p * m * p;
    return out;
  }

  bool operator==(const Context& other) const {
    return basis_.rows() == other.basis_.rows() && max_abs(basis_ - other.basis_) == 0.0;
  }

 private:
  CMat basis_;
  std::vector<CMat> atoms_;
};

/// tr(rho a), clamped to [0, 1].
inline double probability(const State& rho, const Effect& a) {
  if (rho.dim() != a.dim()) throw DimensionError("probability: dimension mismatch");
  const double p = (rho.matrix() * a.matrix()).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

/// A_X = sum_{x in X} A_x.
inline CMat effect_of_event(const Observable& obs, std::span<const std::string> event) {
  CMat out = CMat::Zero(obs.dim(), obs.dim());
  std::unordered_set<std::string> used;
  for (const std::string& x : event) {
    if (!used.insert(x).second) continue;
    out += obs.effect(x);
  }
  return out;
}

inline CMat apply_operation(const KrausOperation& op, const State& rho) {
  return op.apply(rho.matrix());
}

/// The unique observable A measured by an instrument: A_x = sum_k S_{x,k}^* S_{x,k}.
inline Observable measured_observable_of_instrument(const Instrument& inst, Tolerance tol = {}) {
  std::vector<Observable::Outcome> outcomes;
  for (const Instrument::Outcome& o : inst.outcomes()) {
    CMat a = o.operation.apply_dual(identity(inst.dim()));
    outcomes.push_back({o.label, Effect(0.5 * (a + a.adjoint()), tol)});
  }
  return Observable(std::move(outcomes), tol);
}

/// Gamma^*(a) = sum S_i^* a S_i for a channel Gamma.
inline Effect dual_channel(const KrausOperation& op, const Effect& a, Tolerance tol = {}) {
  if (!op.is_channel()) throw ValidationError("dual_channel: operation is not a channel");
  CMat out = op.apply_dual(a.matrix());
  return Effect(0.5 * (out + out.adjoint()), tol);
}

/// Max-entry distance between the superoperators of two maps.
inline double map_distance(const std::vector<CMat>& a, const std::vector<CMat>& b) {
  return max_abs_diff(superoperator(a), superoperator(b));
}

}  // namespace ndmm
