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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ndmm/linalg.hpp"
#include "ndmm/nondisturbing.hpp"
#include "ndmm/quantum_objects.hpp"

namespace ndmm {

/// Row i of the table failed sum_k B_i^{k*} B_i^k = I_K.
class IncompleteRowError : public ValidationError {
 public:
  IncompleteRowError(const std::string& what, std::size_t row)
      : ValidationError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Kraus operator k of a channel failed the commutator test.
class DisturbingKrausError : public DisturbingOperatorError {
 public:
  DisturbingKrausError(const std::string& what, std::size_t index, double norm)
      : DisturbingOperatorError(what, norm), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Per-context-index channel Gamma_i(eta) = sum_k B_i^k eta B_i^{k*} on K.
using GammaChannel = KrausOperation;

/// Context-nondisturbing channel on H (x) K stored as its probe table:
/// table[i][k] = B_i^k, so the induced Kraus operators are
/// S_k = sum_i P_{psi_i} (x) B_i^k.
class NDChannel {
 public:
  using Table = std::vector<std::vector<CMat>>;

  NDChannel(Context context, Table table, Tolerance tol = {})
      : context_(std::move(context)), table_(std::move(table)), tol_(tol) {
    const auto n = static_cast<std::size_t>(context_.dim());
    if (table_.size() != n) {
      throw DimensionError("NDChannel: table has " + std::to_string(table_.size()) +
                           " rows for a context of dimension " + std::to_string(n));
    }
    if (table_.front().empty()) throw DimensionError("NDChannel: table rows are empty");
    const std::size_t m = table_.front().size();
    const Eigen::Index k = table_.front().front().rows();
    for (std::size_t i = 0; i < n; ++i) {
      if (table_[i].size() != m) throw DimensionError("NDChannel: table is not rectangular");
      CMat total = CMat::Zero(k, k);
      for (const CMat& b : table_[i]) {
        if (b.rows() != k || b.cols() != k) {
          throw DimensionError("NDChannel: probe operators of inconsistent dimension");
        }
        if (!all_finite(b)) throw ValidationError("NDChannel: non-finite entry");
        total += b.adjoint() * b;
      }
      const double defect = max_abs(total - identity(k));
      if (defect > tol.atol) {
        throw IncompleteRowError("NDChannel: row " + std::to_string(i) +
                                     " is not a channel (sum B*B differs from I by " +
                                     std::to_string(defect) + ")",
                                 i);
      }
    }
  }

  const Context& context() const noexcept { return context_; }
  const Table& table() const noexcept { return table_; }
  const CMat& probe(std::size_t i, std::size_t k) const { return table_.at(i).at(k); }
  Eigen::Index dimH() const noexcept { return context_.dim(); }
  Eigen::Index dimK() const noexcept { return table_.front().front().rows(); }
  std::size_t kraus_count() const noexcept { return table_.front().size(); }

  /// Probe decomposition of the induced Kraus operator S_k.
  ProbeDecomposition kraus_probes(std::size_t k) const {
    ProbeDecomposition pd{context_, {}};
    for (const auto& row : table_) pd.probes.push_back(row.at(k));
    return pd;
  }

  /// S_k = sum_i P_{psi_i} (x) B_i^k on H (x) K.
  std::vector<CMat> kraus_operators() const {
    std::vector<CMat> out;
    for (std::size_t k = 0; k < kraus_count(); ++k) out.push_back(assemble(kraus_probes(k)));
    return out;
  }

  CMat superoperator() const { return ndmm::superoperator(kraus_operators()); }

  /// Gamma_i; `i` is a 0-based context index.
  GammaChannel gamma(std::size_t i) const {
    if (i >= table_.size()) {
      throw std::out_of_range("NDChannel::gamma: index " + std::to_string(i) +
                              " out of range for " + std::to_string(table_.size()) + " rows");
    }
    return KrausOperation::channel(table_[i], tol_);
  }

 private:
  Context context_;
  Table table_;
  Tolerance tol_;
};

inline NDChannel nd_channel_from_table(const Context& context, NDChannel::Table table,
                                       Tolerance tol = {}) {
  return NDChannel(context, std::move(table), tol);
}

/// Probe table of a Kraus channel whose every operator is context-nondisturbing.
inline NDChannel nd_channel_from_kraus(const std::vector<CMat>& kraus, const Context& context,
                                       Eigen::Index dimK, Tolerance tol = {}) {
  if (kraus.empty()) throw ValidationError("nd_channel_from_kraus: empty Kraus list");
  NDChannel::Table table(static_cast<std::size_t>(context.dim()));
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const double defect = commutator_defect(kraus[k], context, dimK);
    if (defect > tol.atol) {
      throw DisturbingKrausError("nd_channel_from_kraus: Kraus operator " + std::to_string(k) +
                                     " is not context-nondisturbing (max commutator norm " +
                                     std::to_string(defect) + ")",
                                 k, defect);
    }
    const ProbeDecomposition pd = extract_probes(kraus[k], context, dimK, tol);
    for (std::size_t i = 0; i < table.size(); ++i) table[i].push_back(pd.probes[i]);
  }
  // Completeness of the full Kraus list is equivalent to completeness of every row.
  return NDChannel(context, std::move(table), tol);
}

namespace detail {

inline void check_product_dims(const NDChannel& nd, const CMat& rho, const CMat& eta,
                               const char* who) {
  if (rho.rows() != nd.dimH() || rho.cols() != nd.dimH() || eta.rows() != nd.dimK() ||
      eta.cols() != nd.dimK()) {
    throw DimensionError(std::string(who) + ": expected operands on dimensions " +
                         std::to_string(nd.dimH()) + " and " + std::to_string(nd.dimK()) +
                         ", got " + dims_string(rho) + " and " + dims_string(eta));
  }
}

/// sum_{i,j,k} P_i rho P_j (x) B_i^k eta B_j^{k*}, linear in (rho, eta).
inline CMat apply_product_matrix(const NDChannel& nd, const CMat& rho, const CMat& eta) {
  check_product_dims(nd, rho, eta, "apply_product");
  const Eigen::Index n = nd.dimH();
  const Eigen::Index kdim = nd.dimK();
  const Context& c = nd.context();
  CMat out = CMat::Zero(n * kdim, n * kdim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      CMat probe_part = CMat::Zero(kdim, kdim);
      for (std::size_t k = 0; k < nd.kraus_count(); ++k) {
        probe_part += nd.probe(static_cast<std::size_t>(i), k) * eta *
                      nd.probe(static_cast<std::size_t>(j), k).adjoint();
      }
      out += kron(c.atom(i) * rho * c.atom(j), probe_part);
    }
  }
  return out;
}

}  // namespace detail

/// nu(rho (x) eta) from the probe table.
inline CMat apply_product(const NDChannel& nd, const State& rho, const State& eta) {
  return detail::apply_product_matrix(nd, rho.matrix(), eta.matrix());
}

struct ProductPartialTraces {
  CMat over_k;  // tr_K nu(rho (x) eta), on H
  CMat over_h;  // tr_H nu(rho (x) eta), on K
};

/// tr_K = sum_{i,j,k} tr(B_i^k eta B_j^{k*}) P_i rho P_j and
/// tr_H = sum_i <psi_i, rho psi_i> Gamma_i(eta).
inline ProductPartialTraces partial_traces_product(const NDChannel& nd, const State& rho,
                                                   const State& eta) {
  detail::check_product_dims(nd, rho.matrix(), eta.matrix(), "partial_traces_product");
  const Eigen::Index n = nd.dimH();
  const Eigen::Index kdim = nd.dimK();
  const Context& c = nd.context();
  ProductPartialTraces out{CMat::Zero(n, n), CMat::Zero(kdim, kdim)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex weight = 0.0;
      for (std::size_t k = 0; k < nd.kraus_count(); ++k) {
        weight += (nd.probe(ii, k) * eta.matrix() *
                   nd.probe(static_cast<std::size_t>(j), k).adjoint())
                      .trace();
      }
      out.over_k += weight * c.atom(i) * rho.matrix() * c.atom(j);
    }
    out.over_h += c.diagonal_element(rho.matrix(), i).real() * nd.gamma(ii).apply(eta.matrix());
  }
  return out;
}

}  // namespace ndmm
