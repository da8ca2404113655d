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
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ndmm {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Absolute slack used by every semantic predicate (PSD, unitary, equality).
struct Tolerance {
  double atol = 1e-9;
};

inline constexpr double kDefaultAtol = 1e-9;
/// Slack for identities that hold by construction (generators, round trips).
inline constexpr double kConstructionAtol = 1e-12;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input failed a mathematical precondition (not Hermitian, not PSD, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPsdError : public ValidationError {
 public:
  NotPsdError(const std::string& what, double min_eigenvalue)
      : ValidationError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

inline std::string dims_string(const CMat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_square(const CMat& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(who) + ": expected a non-empty square matrix, got " +
                         dims_string(m));
  }
}

inline void require_same_shape(const CMat& a, const CMat& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(who) + ": shape mismatch " + dims_string(a) + " vs " +
                         dims_string(b));
  }
}

/// Largest entry modulus; 0 for an empty matrix.
inline double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
  require_same_shape(a, b, "max_abs_diff");
  return max_abs(a - b);
}

inline bool all_finite(const CMat& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline CMat identity(Eigen::Index n) { return CMat::Identity(n, n); }

inline CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

/// |v><v|
inline CMat outer(const CVec& u, const CVec& v) { return u * v.adjoint(); }

/// Kronecker product. With H-major flattening the basis vector psi_i (x) phi_j
/// of H (x) K sits at flat index i * dim(K) + j.
inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

enum class TraceOut { H, K };

/// Partial trace of an operator on H (x) K. TraceOut::K yields a dimH x dimH
/// matrix, TraceOut::H a dimK x dimK one.
inline CMat partial_trace(const CMat& m, Eigen::Index dimH, Eigen::Index dimK, TraceOut side) {
  if (dimH < 1 || dimK < 1 || m.rows() != dimH * dimK || m.cols() != dimH * dimK) {
    throw DimensionError("partial_trace: matrix " + dims_string(m) + " does not act on a " +
                         std::to_string(dimH) + "x" + std::to_string(dimK) + " tensor product");
  }
  if (side == TraceOut::K) {
    CMat out = CMat::Zero(dimH, dimH);
    for (Eigen::Index i = 0; i < dimH; ++i) {
      for (Eigen::Index k = 0; k < dimH; ++k) {
        out(i, k) = m.block(i * dimK, k * dimK, dimK, dimK).trace();
      }
    }
    return out;
  }
  CMat out = CMat::Zero(dimK, dimK);
  for (Eigen::Index i = 0; i < dimH; ++i) out += m.block(i * dimK, i * dimK, dimK, dimK);
  return out;
}

inline double hermiticity_defect(const CMat& m) { return max_abs(m - m.adjoint()); }

inline bool is_hermitian(const CMat& m, Tolerance tol = {}) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol.atol;
}

inline bool is_unitary(const CMat& m, Tolerance tol = {}) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m * m.adjoint() - identity(m.rows())) <= tol.atol &&
         max_abs(m.adjoint() * m - identity(m.rows())) <= tol.atol;
}

inline bool is_projection(const CMat& m, Tolerance tol = {}) {
  return is_hermitian(m, tol) && max_abs(m * m - m) <= tol.atol;
}

struct HermitianEig {
  RVec values;   // ascending
  CMat vectors;  // columns are eigenvectors
};

/// Spectral decomposition of a Hermitian matrix. The input is symmetrized
/// before decomposition so rounding-level skew does not leak into the result.
inline HermitianEig hermitian_eig(const CMat& m, Tolerance tol = {}) {
  require_square(m, "hermitian_eig");
  const double defect = hermiticity_defect(m);
  if (defect > tol.atol) {
    throw ValidationError("hermitian_eig: matrix is not Hermitian (max |m - m*| = " +
                          std::to_string(defect) + ")");
  }
  const CMat sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const CMat& m, Tolerance tol = {}) {
  return hermitian_eig(m, tol).values(0);
}

inline bool is_psd(const CMat& m, Tolerance tol = {}) {
  return is_hermitian(m, tol) && min_eigenvalue(m, tol) >= -tol.atol;
}

/// Principal square root of a PSD matrix. Eigenvalues in [-atol, 0) are
/// clamped to zero; anything more negative is rejected.
inline CMat psd_sqrt(const CMat& m, Tolerance tol = {}) {
  const HermitianEig eig = hermitian_eig(m, tol);
  if (eig.values(0) < -tol.atol) {
    throw NotPsdError("psd_sqrt: matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(eig.values(0)) + ")",
                      eig.values(0));
  }
  const RVec roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  CMat r = eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (r + r.adjoint());
}

/// a <= b in the Loewner order, i.e. b - a is PSD within tol.
inline bool loewner_leq(const CMat& a, const CMat& b, Tolerance tol = {}) {
  require_square(a, "loewner_leq");
  require_same_shape(a, b, "loewner_leq");
  if (!is_hermitian(a, tol) || !is_hermitian(b, tol)) {
    throw ValidationError("loewner_leq: operands must be Hermitian");
  }
  return min_eigenvalue(b - a, Tolerance{2 * tol.atol}) >= -tol.atol;
}

/// Superoperator of rho -> sum_k S_k rho S_k^* acting on column-stacked rho.
inline CMat superoperator(const std::vector<CMat>& kraus) {
  if (kraus.empty()) throw DimensionError("superoperator: empty Kraus list");
  const Eigen::Index d = kraus.front().rows();
  CMat out = CMat::Zero(d * d, d * d);
  for (const CMat& s : kraus) {
    if (s.rows() != d || s.cols() != d) throw DimensionError("superoperator: ragged Kraus list");
    out += kron(s.conjugate(), s);
  }
  return out;
}

/// Column-stacking vectorization and its inverse.
inline CVec vec(const CMat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }

inline CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

}  // namespace ndmm
