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


#include <catch_amalgamated.hpp>

#include "ndmm/linalg.hpp"
#include "ndmm/random.hpp"
#include "oracles.hpp"

using namespace ndmm;

namespace {

CMat diag(std::initializer_list<double> d) {
  RVec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.cast<Complex>().asDiagonal();
}

}  // namespace

TEST_CASE("kron of identities and of a projection with an identity", "[linalg]") {
  CHECK(max_abs_diff(kron(identity(2), identity(3)), identity(6)) == 0.0);
  CHECK(max_abs_diff(kron(diag({1, 0}), identity(2)), diag({1, 1, 0, 0})) == 0.0);
}

TEST_CASE("kron matches the element formula and the mixed-product rule", "[linalg]") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const CMat a = random_ginibre(2, 2, rng), b = random_ginibre(2, 2, rng);
    const CMat c = random_ginibre(2, 2, rng), d = random_ginibre(2, 2, rng);
    CHECK(max_abs_diff(kron(a, b), ref::kron(a, b)) < 1e-15);
    CHECK(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
    const CMat e = random_ginibre(3, 2, rng);
    CHECK(max_abs_diff(kron(kron(a, b), e), kron(a, kron(b, e))) < 1e-12);
  }
}

TEST_CASE("partial traces of products and identities", "[linalg]") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = rng.uniform_int(1, 4), m = rng.uniform_int(1, 4);
    const CMat a = random_ginibre(n, n, rng), b = random_ginibre(m, m, rng);
    CHECK(max_abs_diff(partial_trace(kron(a, b), n, m, TraceOut::K), b.trace() * a) < 1e-12);
    CHECK(max_abs_diff(partial_trace(kron(a, b), n, m, TraceOut::H), a.trace() * b) < 1e-12);
    const CMat g = random_ginibre(n * m, n * m, rng);
    CHECK(max_abs_diff(partial_trace(g, n, m, TraceOut::K), ref::trace_k(g, n, m)) < 1e-13);
    CHECK(max_abs_diff(partial_trace(g, n, m, TraceOut::H), ref::trace_h(g, n, m)) < 1e-13);
    const CMat kk = partial_trace(g, n, m, TraceOut::K);
    CHECK(std::abs(kk.trace() - g.trace()) < 1e-12);
  }
  CHECK(max_abs_diff(partial_trace(identity(6), 2, 3, TraceOut::K), 3.0 * identity(2)) == 0.0);
  CHECK_THROWS_AS(partial_trace(identity(6), 4, 2, TraceOut::K), DimensionError);
}

TEST_CASE("hermitian_eig on diagonal, rank-one and random inputs", "[linalg]") {
  const HermitianEig d = hermitian_eig(diag({3, 1}));
  CHECK(d.values(0) == Catch::Approx(1.0));
  CHECK(d.values(1) == Catch::Approx(3.0));

  CVec phi(3);
  phi << Complex(1, 1), 2.0, Complex(0, -1);
  phi.normalize();
  const RVec ev = hermitian_eig(outer(phi, phi)).values;
  CHECK(std::abs(ev(0)) < 1e-12);
  CHECK(std::abs(ev(1)) < 1e-12);
  CHECK(std::abs(ev(2) - 1.0) < 1e-12);

  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const CMat h = random_hermitian(5, rng);
    const HermitianEig e = hermitian_eig(h);
    const CMat back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    REQUIRE(max_abs_diff(back, h) < 1e-10);
  }
  CHECK_THROWS_AS(hermitian_eig(random_ginibre(3, 3, rng)), ValidationError);
}

TEST_CASE("psd_sqrt", "[linalg]") {
  CHECK(max_abs_diff(psd_sqrt(identity(3)), identity(3)) < 1e-15);
  CHECK(max_abs_diff(psd_sqrt(diag({4, 9})), diag({2, 3})) < 1e-14);
  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    const CMat f = random_effect(4, rng);
    const CMat r = psd_sqrt(f);
    CHECK(max_abs_diff(r * r, f) < 1e-12);
    CHECK(is_psd(r));
    CHECK(hermiticity_defect(r) == 0.0);
  }
  try {
    psd_sqrt(diag({1, -0.5}));
    FAIL("expected NotPsdError");
  } catch (const NotPsdError& e) {
    CHECK(e.min_eigenvalue() == Catch::Approx(-0.5));
  }
}

TEST_CASE("loewner order", "[linalg]") {
  CHECK(loewner_leq(CMat::Zero(3, 3), identity(3)));
  CVec phi = CVec::Zero(3);
  phi(0) = 1.0;
  CHECK_FALSE(loewner_leq(identity(3), outer(phi, phi)));

  Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    const CMat a = random_hermitian(3, rng);
    const CMat p = random_density(3, rng), q = random_density(3, rng);
    CHECK(loewner_leq(a, a));
    CHECK(loewner_leq(a, a + p));
    CHECK(loewner_leq(a + p, a + p + q));
    CHECK(loewner_leq(a, a + p + q));
    CHECK_FALSE(loewner_leq(a + p, a));
    // Antisymmetry: both directions only within tolerance of equality.
    const CMat b = a + 1e-11 * random_hermitian(3, rng);
    if (loewner_leq(a, b) && loewner_leq(b, a)) CHECK(max_abs_diff(a, b) <= 3 * kDefaultAtol);
  }
}

TEST_CASE("structural predicates", "[linalg]") {
  CMat x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  CHECK(is_hermitian(x));
  CHECK(is_unitary(x));
  CHECK_FALSE(is_projection(x));
  CHECK(is_projection(diag({1, 0})));
  CHECK_FALSE(is_unitary(diag({1, 0})));
  CHECK_FALSE(is_hermitian(CMat::Identity(2, 2) * Complex(0, 1)));
}

TEST_CASE("superoperator acts by column stacking", "[linalg]") {
  Rng rng(16);
  const std::vector<CMat> kraus = random_kraus_channel(3, 2, rng);
  const CMat rho = random_density(3, rng);
  const CMat image = unvec(superoperator(kraus) * vec(rho), 3, 3);
  CHECK(max_abs_diff(image, ref::kraus_sum(kraus, rho)) < 1e-13);
  CHECK(max_abs_diff(unvec(vec(rho), 3, 3), rho) == 0.0);
}
