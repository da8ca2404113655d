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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "ndmm/linalg.hpp"

namespace ndmm {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the stream (master, name, counter). Streams with distinct names or
/// counters do not depend on each other, so adding a stream never shifts another.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t counter = 0) noexcept {
  return mix_seed(mix_seed(master ^ fnv1a(name)) + counter);
}

/// Deterministic random source. Distributions are computed here from raw
/// mt19937_64 output instead of <random> distributions, whose algorithms are
/// implementation-defined, so equal seeds give bit-identical values everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of i.i.d. standard complex Gaussians (Ginibre ensemble).
inline CMat random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMat g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

namespace detail {

/// Orthonormal columns from Householder QR, with the phases of R's diagonal
/// moved into Q so the result is Haar-distributed.
inline CMat orthonormal_columns(const CMat& g) {
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * CMat::Identity(g.rows(), g.cols());
  const CMat& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

/// Inverse square root of a positive definite matrix.
inline CMat inverse_sqrt(const CMat& s) {
  const HermitianEig eig = hermitian_eig(s);
  const RVec inv = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * inv.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

}  // namespace detail

inline CMat random_unitary(Eigen::Index dim, Rng& rng) {
  return detail::orthonormal_columns(random_ginibre(dim, dim, rng));
}

/// Full-rank density matrix G G* / tr(G G*).
inline CMat random_density(Eigen::Index dim, Rng& rng) {
  const CMat g = random_ginibre(dim, dim, rng);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Pure state |v><v| for a Haar-random unit vector v.
inline CMat random_pure_state(Eigen::Index dim, Rng& rng) {
  CVec v = random_ginibre(dim, 1, rng).col(0);
  v.normalize();
  return outer(v, v);
}

/// Effect U diag(u) U* with u uniform in [0, 1].
inline CMat random_effect(Eigen::Index dim, Rng& rng) {
  const CMat u = random_unitary(dim, rng);
  RVec spectrum(dim);
  for (Eigen::Index i = 0; i < dim; ++i) spectrum(i) = rng.uniform();
  CMat e = u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
  return 0.5 * (e + e.adjoint());
}

inline CMat random_hermitian(Eigen::Index dim, Rng& rng) {
  const CMat g = random_ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

/// POVM with `count` effects: S^{-1/2} P_x S^{-1/2} for random PSD parts P_x
/// and S = sum_x P_x.
inline std::vector<CMat> random_povm(Eigen::Index dim, int count, Rng& rng) {
  std::vector<CMat> parts;
  parts.reserve(static_cast<std::size_t>(count));
  CMat total = CMat::Zero(dim, dim);
  for (int x = 0; x < count; ++x) {
    const CMat g = random_ginibre(dim, dim, rng);
    parts.push_back(g * g.adjoint());
    total += parts.back();
  }
  const CMat w = detail::inverse_sqrt(total);
  for (CMat& p : parts) {
    p = w * p * w;
    p = 0.5 * (p + p.adjoint());
  }
  return parts;
}

/// Kraus operators {S_k} of a random channel: the blocks of an isometry
/// obtained by orthonormalizing a (count*dim) x dim Gaussian matrix.
inline std::vector<CMat> random_kraus_channel(Eigen::Index dim, int count, Rng& rng) {
  const CMat w = detail::orthonormal_columns(random_ginibre(count * dim, dim, rng));
  std::vector<CMat> kraus;
  kraus.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) kraus.push_back(w.block(k * dim, 0, dim, dim));
  return kraus;
}

// Seeded convenience overloads.
inline CMat random_unitary(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}
inline CMat random_density(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(dim, rng);
}
inline CMat random_effect(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_effect(dim, rng);
}
inline std::vector<CMat> random_povm(Eigen::Index dim, int count, std::uint64_t seed) {
  Rng rng(seed);
  return random_povm(dim, count, rng);
}
inline std::vector<CMat> random_kraus_channel(Eigen::Index dim, int count, std::uint64_t seed) {
  Rng rng(seed);
  return random_kraus_channel(dim, count, rng);
}

}  // namespace ndmm
