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

// Two unitary nondisturbing measurement models with closed-form answers.
//
// Both use the standard bases {psi_i} of H and {phi_s} of K, the unitary
// U = sum_i P_{psi_i} (x) V_i and the initial probe state P_{phi_1}.
//
//  * swap:    dim H = dim K = n, V_i exchanges phi_1 and phi_i.
//  * fourier: dim H = n, dim K = m, V_j phi_r = m^{-1/2} sum_s e^{2 pi i j r s / m} phi_s.
//    V_j is unitary only when gcd(j, m) = 1, so the builder rejects any
//    (n, m) with a j in 1..n sharing a factor with m. Choosing m prime and
//    n <= m - 1 always works.
//
// Indices in the public API are 0-based; the fourier phase uses the 1-based
// j, r, s of the definition above.

#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ndmm/linalg.hpp"
#include "ndmm/measurement_model.hpp"
#include "ndmm/nd_channel.hpp"
#include "ndmm/quantum_objects.hpp"

namespace ndmm {

class NonUnitaryFourierError : public ValidationError {
 public:
  NonUnitaryFourierError(const std::string& what, int j) : ValidationError(what), j_(j) {}
  /// The offending 1-based index j with gcd(j, m) != 1.
  int j() const noexcept { return j_; }

 private:
  int j_;
};

inline CVec basis_vector(Eigen::Index dim, Eigen::Index i) {
  CVec v = CVec::Zero(dim);
  v(i) = 1.0;
  return v;
}

/// Projections onto the standard basis {phi_s} of K.
inline Observable sharp_probe(Eigen::Index dim) {
  std::vector<CMat> effects;
  for (Eigen::Index s = 0; s < dim; ++s) {
    effects.push_back(outer(basis_vector(dim, s), basis_vector(dim, s)));
  }
  return Observable::from_matrices(effects);
}

/// V_i for 0-based i: swaps phi_0 and phi_i, fixes every other basis vector.
inline CMat swap_operator(Eigen::Index n, Eigen::Index i) {
  if (i < 0 || i >= n) throw std::out_of_range("swap_operator: index out of range");
  CMat v = identity(n);
  if (i != 0) {
    v(0, 0) = v(i, i) = 0.0;
    v(0, i) = v(i, 0) = 1.0;
  }
  return v;
}

/// V_j with entries V(s, r) = e^{2 pi i j r s / m} / sqrt(m), 1-based j, r, s.
inline CMat fourier_operator(int m, int j) {
  CMat v(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int s = 1; s <= m; ++s) {
    for (int r = 1; r <= m; ++r) {
      // Reduce the exponent mod m before forming the phase to keep it exact.
      const long long phase = (static_cast<long long>(j) * r * s) % m;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / m;
      v(s - 1, r - 1) = std::polar(scale, angle);
    }
  }
  return v;
}

struct SwapSpec {
  int n = 2;
  Observable probe = sharp_probe(2);
  std::optional<CMat> eta;  // defaults to P_{phi_1}
};

struct FourierSpec {
  int n = 2;
  int m = 3;
  Observable probe = sharp_probe(3);
  std::optional<CMat> eta;  // defaults to P_{phi_1}
};

inline MeasurementModel build_swap_mm(const SwapSpec& spec) {
  if (spec.n < 1) throw ValidationError("build_swap_mm: n must be at least 1");
  if (spec.probe.dim() != spec.n) {
    throw DimensionError("build_swap_mm: probe acts on dimension " +
                         std::to_string(spec.probe.dim()) + ", expected " +
                         std::to_string(spec.n));
  }
  NDChannel::Table table;
  for (int i = 0; i < spec.n; ++i) table.push_back({swap_operator(spec.n, i)});
  const CMat eta = spec.eta.value_or(outer(basis_vector(spec.n, 0), basis_vector(spec.n, 0)));
  return MeasurementModel(spec.n, State(eta), NDChannel(Context::standard(spec.n), std::move(table)),
                          spec.probe);
}

inline MeasurementModel build_fourier_mm(const FourierSpec& spec) {
  if (spec.n < 1) throw ValidationError("build_fourier_mm: n must be at least 1");
  if (spec.m < 2) throw ValidationError("build_fourier_mm: m must be at least 2");
  if (spec.probe.dim() != spec.m) {
    throw DimensionError("build_fourier_mm: probe acts on dimension " +
                         std::to_string(spec.probe.dim()) + ", expected " +
                         std::to_string(spec.m));
  }
  NDChannel::Table table;
  for (int j = 1; j <= spec.n; ++j) {
    if (std::gcd(j, spec.m) != 1) {
      throw NonUnitaryFourierError("build_fourier_mm: V_" + std::to_string(j) +
                                       " is not unitary because gcd(" + std::to_string(j) + ", " +
                                       std::to_string(spec.m) + ") != 1",
                                   j);
    }
    CMat v = fourier_operator(spec.m, j);
    if (!is_unitary(v)) {
      throw NonUnitaryFourierError("build_fourier_mm: V_" + std::to_string(j) + " failed the unitarity check", j);
    }
    table.push_back({std::move(v)});
  }
  const CMat eta = spec.eta.value_or(outer(basis_vector(spec.m, 0), basis_vector(spec.m, 0)));
  return MeasurementModel(spec.n, State(eta), NDChannel(Context::standard(spec.n), std::move(table)),
                          spec.probe);
}

// ---------------------------------------------------------------------------
// Closed forms for the swap model (standard bases, eta = P_{phi_1}).

/// I_x(rho) = sum_{i,j} <phi_j, F_x phi_i> P_{psi_i} rho P_{psi_j}.
inline CMat swap_instrument_closed_form(const CMat& fx, const CMat& rho) {
  const Eigen::Index n = rho.rows();
  CMat out = CMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = fx(j, i) * rho(i, j);
  }
  return out;
}

/// M_x = sum_i <phi_i, F_x phi_i> P_{psi_i}.
inline CMat swap_observable_closed_form(const CMat& fx) {
  return fx.diagonal().real().cast<Complex>().asDiagonal();
}

/// nu(rho (x) P_{phi_1}) = sum_{i,j} P_{psi_i} rho P_{psi_j} (x) |phi_i><phi_j|.
inline CMat swap_channel_closed_form(const CMat& rho) {
  const Eigen::Index n = rho.rows();
  CMat out = CMat::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      CMat block = CMat::Zero(n, n);
      block(i, j) = rho(i, j);
      out += kron(outer(basis_vector(n, i), basis_vector(n, j)), block);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms for the fourier model (standard bases, eta = P_{phi_1}).

/// tr(|V_j phi_1><V_k phi_1| F) = (1/m) sum_{s,t} e^{2 pi i (j s - k t)/m} <phi_t, F phi_s>
/// for 1-based j, k.
inline Complex fourier_trace_coefficient(const CMat& f, int j, int k) {
  const auto m = static_cast<int>(f.rows());
  Complex sum = 0.0;
  for (int s = 1; s <= m; ++s) {
    for (int t = 1; t <= m; ++t) {
      const long long phase = ((static_cast<long long>(j) * s - static_cast<long long>(k) * t) % m + m) % m;
      sum += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / m) *
             f(t - 1, s - 1);
    }
  }
  return sum / static_cast<double>(m);
}

/// I_x(rho) = sum_{j,k} tr(|V_j phi_1><V_k phi_1| F_x) P_{psi_j} rho P_{psi_k}.
inline CMat fourier_instrument_closed_form(const CMat& fx, const CMat& rho) {
  const Eigen::Index n = rho.rows();
  CMat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      out(j, k) = fourier_trace_coefficient(fx, static_cast<int>(j) + 1, static_cast<int>(k) + 1) *
                  rho(j, k);
    }
  }
  return out;
}

/// M_x = (1/m) sum_{j,s,t} e^{2 pi i j (s - t)/m} <phi_t, F_x phi_s> P_{psi_j}.
inline CMat fourier_observable_closed_form(const CMat& fx, int n) {
  CMat out = CMat::Zero(n, n);
  for (int j = 1; j <= n; ++j) out(j - 1, j - 1) = fourier_trace_coefficient(fx, j, j).real();
  return out;
}

/// tr(F) / dim: the average eigenvalue.
inline double average_eigenvalue(const CMat& f) {
  return f.trace().real() / static_cast<double>(f.rows());
}

}  // namespace ndmm
