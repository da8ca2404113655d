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

// Measurement models (H, K, eta, nu, F): a base system H is coupled to a probe
// system K in state eta by a channel nu on H (x) K, and the probe observable F
// is read out on K.
//
// Two evaluation paths are provided. The `_direct` functions build nu(rho (x) eta)
// on the full tensor product and take partial traces; they work for any
// channel. The closed forms work from the probe table of a context-
// nondisturbing channel and never touch H (x) K.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ndmm/linalg.hpp"
#include "ndmm/nd_channel.hpp"
#include "ndmm/nondisturbing.hpp"
#include "ndmm/quantum_objects.hpp"

namespace ndmm {

/// A closed form was requested for a model whose channel is not given in
/// context-nondisturbing form.
class NotNondisturbingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MeasurementModel {
 public:
  using Channel = std::variant<KrausOperation, NDChannel>;

  MeasurementModel(Eigen::Index dimH, State eta, Channel channel, Observable probe)
      : dimH_(dimH), eta_(std::move(eta)), channel_(std::move(channel)),
        probe_(std::move(probe)) {
    const Eigen::Index dimK = eta_.dim();
    if (dimH_ < 1) throw DimensionError("MeasurementModel: dimH must be positive");
    if (probe_.dim() != dimK) {
      throw DimensionError("MeasurementModel: probe observable acts on dimension " +
                           std::to_string(probe_.dim()) + ", probe state on " +
                           std::to_string(dimK));
    }
    if (const auto* generic = std::get_if<KrausOperation>(&channel_)) {
      if (!generic->is_channel()) {
        throw ValidationError("MeasurementModel: interaction is not a channel");
      }
      if (generic->dim() != dimH_ * dimK) {
        throw DimensionError("MeasurementModel: channel acts on dimension " +
                             std::to_string(generic->dim()) + ", expected " +
                             std::to_string(dimH_ * dimK));
      }
    } else {
      const auto& nd = std::get<NDChannel>(channel_);
      if (nd.dimH() != dimH_ || nd.dimK() != dimK) {
        throw DimensionError("MeasurementModel: probe table dimensions do not match (H, K)");
      }
    }
  }

  Eigen::Index dimH() const noexcept { return dimH_; }
  Eigen::Index dimK() const noexcept { return eta_.dim(); }
  const State& eta() const noexcept { return eta_; }
  const Observable& probe() const noexcept { return probe_; }
  const Channel& channel() const noexcept { return channel_; }
  bool is_nondisturbing() const noexcept { return std::holds_alternative<NDChannel>(channel_); }

  const NDChannel& nd() const {
    if (const auto* nd = std::get_if<NDChannel>(&channel_)) return *nd;
    throw NotNondisturbingError(
        "closed form requires a context-nondisturbing channel given as a probe table");
  }

  /// Kraus operators of nu on H (x) K, whichever form the channel is stored in.
  std::vector<CMat> kraus_operators() const {
    if (const auto* generic = std::get_if<KrausOperation>(&channel_)) return generic->kraus();
    return std::get<NDChannel>(channel_).kraus_operators();
  }

  /// Same model with a different probe observable.
  MeasurementModel with_probe(Observable probe) const {
    return MeasurementModel(dimH_, eta_, channel_, std::move(probe));
  }

 private:
  Eigen::Index dimH_;
  State eta_;
  Channel channel_;
  Observable probe_;
};

namespace detail {

inline CMat apply_kraus(const std::vector<CMat>& kraus, const CMat& m) {
  CMat out = CMat::Zero(m.rows(), m.cols());
  for (const CMat& s : kraus) out += s * m * s.adjoint();
  return out;
}

inline void check_dim(const CMat& m, Eigen::Index d, const char* who) {
  if (m.rows() != d || m.cols() != d) {
    throw DimensionError(std::string(who) + ": operand " + dims_string(m) +
                         " does not match dimension " + std::to_string(d));
  }
}

inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Measured instrument and observable on the base system.

/// tr_K[nu(rho (x) eta)(I (x) F_x)], valid for any channel.
inline CMat measured_instrument_direct(const MeasurementModel& mm, const std::string& label,
                                       const State& rho) {
  detail::check_dim(rho.matrix(), mm.dimH(), "measured_instrument_direct");
  const CMat& fx = mm.probe().effect(label);
  const CMat evolved = detail::apply_kraus(mm.kraus_operators(), kron(rho.matrix(), mm.eta().matrix()));
  return partial_trace(evolved * kron(identity(mm.dimH()), fx), mm.dimH(), mm.dimK(), TraceOut::K);
}

/// Coefficients c_ij = sum_k tr(B_i^k eta B_j^{k*} F_x) of the measured
/// instrument I_x(rho) = sum_{i,j} c_ij P_i rho P_j. The matrix c is PSD.
inline CMat instrument_coefficients(const MeasurementModel& mm, std::size_t x) {
  const NDChannel& nd = mm.nd();
  const CMat& fx = mm.probe().effect(x);
  const CMat& eta = mm.eta().matrix();
  const auto n = static_cast<std::size_t>(mm.dimH());
  CMat c = CMat::Zero(mm.dimH(), mm.dimH());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex sum = 0.0;
      for (std::size_t k = 0; k < nd.kraus_count(); ++k) {
        sum += (nd.probe(i, k) * eta * nd.probe(j, k).adjoint() * fx).trace();
      }
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum;
    }
  }
  return c;
}

namespace detail {

inline CMat coefficient_sandwich(const Context& ctx, const CMat& c, const CMat& rho) {
  CMat out = CMat::Zero(ctx.dim(), ctx.dim());
  for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
    for (Eigen::Index j = 0; j < ctx.dim(); ++j) {
      out += c(i, j) * ctx.atom(i) * rho * ctx.atom(j);
    }
  }
  return out;
}

}  // namespace detail

/// Closed form sum_{i,j,k} tr(B_i^k eta B_j^{k*} F_x) P_i rho P_j.
inline CMat measured_instrument_nd(const MeasurementModel& mm, const std::string& label,
                                   const State& rho) {
  detail::check_dim(rho.matrix(), mm.dimH(), "measured_instrument_nd");
  const CMat c = instrument_coefficients(mm, mm.probe().index_of(label));
  return detail::coefficient_sandwich(mm.nd().context(), c, rho.matrix());
}

/// Superoperator (column stacking) of the closed-form measured instrument at x.
inline CMat measured_instrument_superoperator(const MeasurementModel& mm, const std::string& label) {
  const CMat c = instrument_coefficients(mm, mm.probe().index_of(label));
  const Context& ctx = mm.nd().context();
  const Eigen::Index n = ctx.dim();
  CMat out = CMat::Zero(n * n, n * n);
  // vec(P_i rho P_j) = (P_j^T (x) P_i) vec(rho)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out += c(i, j) * kron(ctx.atom(j).transpose(), ctx.atom(i));
    }
  }
  return out;
}

/// A Kraus form of the closed-form measured instrument at x, from the spectral
/// decomposition c = sum_r mu_r w_r w_r^*: K_r = sqrt(mu_r) sum_i w_ri P_i.
/// Zero-weight terms are dropped.
inline KrausOperation measured_instrument_kraus(const MeasurementModel& mm,
                                                const std::string& label, Tolerance tol = {}) {
  const CMat c = instrument_coefficients(mm, mm.probe().index_of(label));
  const HermitianEig eig = hermitian_eig(detail::hermitian_part(c), tol);
  if (eig.values(0) < -tol.atol) {
    throw NotPsdError("measured_instrument_kraus: coefficient matrix is not PSD", eig.values(0));
  }
  const Context& ctx = mm.nd().context();
  std::vector<CMat> kraus;
  for (Eigen::Index r = 0; r < eig.values.size(); ++r) {
    if (eig.values(r) <= tol.atol * tol.atol) continue;
    CMat k = CMat::Zero(ctx.dim(), ctx.dim());
    for (Eigen::Index i = 0; i < ctx.dim(); ++i) k += eig.vectors(i, r) * ctx.atom(i);
    kraus.push_back(std::sqrt(eig.values(r)) * k);
  }
  if (kraus.empty()) kraus.push_back(CMat::Zero(ctx.dim(), ctx.dim()));
  return KrausOperation(std::move(kraus), KrausOperation::Kind::Operation, tol);
}

/// M_x = sum_i tr[Gamma_i(eta) F_x] P_i; every effect is diagonal in the context.
inline Observable measured_observable_nd(const MeasurementModel& mm, Tolerance tol = {}) {
  const NDChannel& nd = mm.nd();
  const Context& ctx = nd.context();
  std::vector<CMat> evolved;
  for (std::size_t i = 0; i < static_cast<std::size_t>(ctx.dim()); ++i) {
    evolved.push_back(nd.gamma(i).apply(mm.eta().matrix()));
  }
  std::vector<Observable::Outcome> outcomes;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    const CMat& fx = mm.probe().effect(x);
    CMat m = CMat::Zero(ctx.dim(), ctx.dim());
    for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
      m += (evolved[static_cast<std::size_t>(i)] * fx).trace().real() * ctx.atom(i);
    }
    outcomes.push_back({mm.probe().label(x), Effect(detail::hermitian_part(m), tol)});
  }
  return Observable(std::move(outcomes), tol);
}

/// Measured observable for any channel through the dual map:
/// M_x = tr_K[(I (x) eta) nu^*(I (x) F_x)].
inline Observable measured_observable_direct(const MeasurementModel& mm, Tolerance tol = {}) {
  const std::vector<CMat> kraus = mm.kraus_operators();
  const CMat lifted_eta = kron(identity(mm.dimH()), mm.eta().matrix());
  std::vector<Observable::Outcome> outcomes;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    const CMat lifted_f = kron(identity(mm.dimH()), mm.probe().effect(x));
    CMat dual = CMat::Zero(lifted_f.rows(), lifted_f.cols());
    for (const CMat& s : kraus) dual += s.adjoint() * lifted_f * s;
    const CMat m = partial_trace(lifted_eta * dual, mm.dimH(), mm.dimK(), TraceOut::K);
    outcomes.push_back({mm.probe().label(x), Effect(detail::hermitian_part(m), tol)});
  }
  return Observable(std::move(outcomes), tol);
}

// ---------------------------------------------------------------------------
// Post-interaction probe instrument and observable on the probe system.

/// tr_H[(I (x) F_x)^{1/2} nu(rho (x) sigma) (I (x) F_x)^{1/2}], valid for any channel.
inline CMat post_probe_instrument_direct(const MeasurementModel& mm, const State& rho,
                                         const std::string& label, const State& sigma,
                                         Tolerance tol = {}) {
  detail::check_dim(rho.matrix(), mm.dimH(), "post_probe_instrument_direct");
  detail::check_dim(sigma.matrix(), mm.dimK(), "post_probe_instrument_direct");
  const CMat root = kron(identity(mm.dimH()), psd_sqrt(mm.probe().effect(label), tol));
  const CMat evolved = detail::apply_kraus(mm.kraus_operators(), kron(rho.matrix(), sigma.matrix()));
  return partial_trace(root * evolved * root, mm.dimH(), mm.dimK(), TraceOut::H);
}

/// Closed form sum_i <psi_i, rho psi_i> F_x^{1/2} Gamma_i(sigma) F_x^{1/2}.
inline CMat post_probe_instrument_nd(const MeasurementModel& mm, const State& rho,
                                     const std::string& label, const State& sigma,
                                     Tolerance tol = {}) {
  const NDChannel& nd = mm.nd();
  detail::check_dim(rho.matrix(), mm.dimH(), "post_probe_instrument_nd");
  detail::check_dim(sigma.matrix(), mm.dimK(), "post_probe_instrument_nd");
  const CMat root = psd_sqrt(mm.probe().effect(label), tol);
  const Context& ctx = nd.context();
  CMat mixed = CMat::Zero(mm.dimK(), mm.dimK());
  for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
    mixed += ctx.diagonal_element(rho.matrix(), i).real() *
             nd.gamma(static_cast<std::size_t>(i)).apply(sigma.matrix());
  }
  return root * mixed * root;
}

/// (M~^rho)_x = sum_i <psi_i, rho psi_i> Gamma_i^*(F_x), an observable on K.
inline Observable post_probe_observable(const MeasurementModel& mm, const State& rho,
                                        Tolerance tol = {}) {
  const NDChannel& nd = mm.nd();
  detail::check_dim(rho.matrix(), mm.dimH(), "post_probe_observable");
  const Context& ctx = nd.context();
  std::vector<double> weights;
  for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
    weights.push_back(ctx.diagonal_element(rho.matrix(), i).real());
  }
  std::vector<Observable::Outcome> outcomes;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    CMat g = CMat::Zero(mm.dimK(), mm.dimK());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      g += weights[i] * nd.gamma(i).apply_dual(mm.probe().effect(x));
    }
    outcomes.push_back({mm.probe().label(x), Effect(detail::hermitian_part(g), tol)});
  }
  return Observable(std::move(outcomes), tol);
}

// ---------------------------------------------------------------------------
// Apparatus and state-dependent remeasurement.

/// Map (rho, x) -> effect, affine in rho and an observable in x for each rho.
class Apparatus {
 public:
  using Evaluator = std::function<CMat(const CMat& rho, std::size_t x)>;

  Apparatus(std::vector<std::string> labels, Eigen::Index input_dim, Eigen::Index output_dim,
            Evaluator evaluator)
      : labels_(std::move(labels)), input_dim_(input_dim), output_dim_(output_dim),
        evaluator_(std::move(evaluator)) {}

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Eigen::Index input_dim() const noexcept { return input_dim_; }
  Eigen::Index output_dim() const noexcept { return output_dim_; }

  /// Evaluator applied to an arbitrary matrix (the affine map's linear extension).
  CMat effect_matrix(const CMat& rho, std::size_t x) const {
    detail::check_dim(rho, input_dim_, "Apparatus");
    return evaluator_(rho, x);
  }

  CMat effect(const State& rho, const std::string& label) const {
    for (std::size_t x = 0; x < labels_.size(); ++x) {
      if (labels_[x] == label) return effect_matrix(rho.matrix(), x);
    }
    throw UnknownLabelError("unknown outcome label '" + label + "'");
  }

  Observable observable(const State& rho, Tolerance tol = {}) const {
    std::vector<Observable::Outcome> outcomes;
    for (std::size_t x = 0; x < labels_.size(); ++x) {
      outcomes.push_back(
          {labels_[x], Effect(detail::hermitian_part(effect_matrix(rho.matrix(), x)), tol)});
    }
    return Observable(std::move(outcomes), tol);
  }

 private:
  std::vector<std::string> labels_;
  Eigen::Index input_dim_;
  Eigen::Index output_dim_;
  Evaluator evaluator_;
};

/// A(rho, x) = sum_i <psi_i, rho psi_i> Gamma_i^*(F_x), the post-interaction
/// probe observable as a function of the input state.
inline Apparatus apparatus_from_mm(const MeasurementModel& mm) {
  const NDChannel& nd = mm.nd();
  std::vector<CMat> duals;  // duals[x * n + i] = Gamma_i^*(F_x)
  const auto n = static_cast<std::size_t>(nd.dimH());
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    for (std::size_t i = 0; i < n; ++i) duals.push_back(nd.gamma(i).apply_dual(mm.probe().effect(x)));
  }
  Context ctx = nd.context();
  const Eigen::Index dimK = mm.dimK();
  return Apparatus(mm.probe().labels(), mm.dimH(), dimK,
                   [ctx = std::move(ctx), duals = std::move(duals), n, dimK](const CMat& rho,
                                                                            std::size_t x) {
                     CMat out = CMat::Zero(dimK, dimK);
                     for (std::size_t i = 0; i < n; ++i) {
                       out += ctx.diagonal_element(rho, static_cast<Eigen::Index>(i)) *
                              duals.at(x * n + i);
                     }
                     return out;
                   });
}

/// The model M_rho = (H, K, eta, nu, G(rho, .)) whose probe observable is an
/// apparatus on K evaluated at rho.
inline MeasurementModel state_dependent_model(const MeasurementModel& mm, const Apparatus& g,
                                              const State& rho, Tolerance tol = {}) {
  if (g.output_dim() != mm.dimK()) {
    throw DimensionError("state_dependent_model: apparatus does not produce effects on K");
  }
  return mm.with_probe(g.observable(rho, tol));
}

/// Second-round apparatus on H obtained by remeasuring with M_rho, where the
/// probe observable is A(rho, .) from apparatus_from_mm:
///   B(rho, x) = sum_{i,j} tr[Gamma_j(eta) Gamma_i^*(F_x)] <psi_i, rho psi_i> P_{psi_j}.
inline Apparatus remeasure_apparatus(const MeasurementModel& mm) {
  const NDChannel& nd = mm.nd();
  const auto n = static_cast<std::size_t>(nd.dimH());
  std::vector<CMat> evolved_eta;
  for (std::size_t j = 0; j < n; ++j) evolved_eta.push_back(nd.gamma(j).apply(mm.eta().matrix()));
  // weights[x](i, j) = tr[Gamma_j(eta) Gamma_i^*(F_x)]
  std::vector<CMat> weights;
  for (std::size_t x = 0; x < mm.probe().size(); ++x) {
    CMat w(nd.dimH(), nd.dimH());
    for (std::size_t i = 0; i < n; ++i) {
      const CMat dual = nd.gamma(i).apply_dual(mm.probe().effect(x));
      for (std::size_t j = 0; j < n; ++j) {
        w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (evolved_eta[j] * dual).trace();
      }
    }
    weights.push_back(std::move(w));
  }
  Context ctx = nd.context();
  return Apparatus(mm.probe().labels(), mm.dimH(), mm.dimH(),
                   [ctx = std::move(ctx), weights = std::move(weights)](const CMat& rho,
                                                                       std::size_t x) {
                     const CMat& w = weights.at(x);
                     CMat out = CMat::Zero(ctx.dim(), ctx.dim());
                     for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
                       const Complex p = ctx.diagonal_element(rho, i);
                       for (Eigen::Index j = 0; j < ctx.dim(); ++j) out += w(i, j) * p * ctx.atom(j);
                     }
                     return out;
                   });
}

/// B(rho, .) as an observable on H.
inline Observable remeasure(const MeasurementModel& mm, const State& rho, Tolerance tol = {}) {
  return remeasure_apparatus(mm).observable(rho, tol);
}

}  // namespace ndmm
