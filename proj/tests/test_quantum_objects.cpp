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


#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "ndmm/quantum_objects.hpp"
#include "ndmm/random.hpp"
#include "oracles.hpp"

using namespace ndmm;

namespace {

CMat projector(Eigen::Index d, Eigen::Index i) {
  CMat p = CMat::Zero(d, d);
  p(i, i) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("value types reject invalid matrices", "[objects]") {
  CHECK_THROWS_AS(Effect(2.0 * identity(2)), ValidationError);
  CHECK_THROWS_AS(Effect(-projector(2, 0)), ValidationError);
  CHECK_THROWS_AS(Effect(CMat::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(State(identity(2)), ValidationError);
  CHECK_NOTHROW(PartialState(0.3 * projector(2, 0)));
  CHECK_THROWS_AS(PartialState(identity(2)), ValidationError);
  CMat skew(2, 2);
  skew << 0.5, 0.5, -0.5, 0.5;
  CHECK_THROWS_AS(State(skew), ValidationError);
  CMat neg(2, 2);
  neg << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(State(neg), NotPsdError);
}

TEST_CASE("observables check labels and completeness", "[objects]") {
  CHECK_THROWS_AS(Observable::from_matrices({projector(2, 0)}), ValidationError);
  CHECK_THROWS_AS(Observable({{"a", Effect(projector(2, 0))}, {"a", Effect(projector(2, 1))}}), ValidationError);
  CHECK_THROWS_AS(Observable({{"a", Effect(projector(2, 0))}, {"b", Effect(projector(3, 1))}}), DimensionError);
  const Observable obs({{"up", Effect(projector(2, 0))}, {"down", Effect(projector(2, 1))}});
  CHECK(obs.index_of("down") == 1);
  CHECK(obs.labels() == std::vector<std::string>{"up", "down"});
  CHECK_THROWS_AS(obs.effect("sideways"), UnknownLabelError);
}

TEST_CASE("probability", "[objects]") {
  Rng rng(1);
  const State rho(random_density(3, rng));
  CHECK(probability(rho, Effect(identity(3))) == Catch::Approx(1.0));
  CHECK(probability(rho, Effect(CMat::Zero(3, 3))) == 0.0);
  const State pure(projector(3, 1));
  CHECK(probability(pure, Effect(projector(3, 1))) == Catch::Approx(1.0));
}

TEST_CASE("events: empty, total and disjoint unions", "[objects]") {
  Rng rng(2);
  const Observable obs = Observable::from_matrices(random_povm(3, 4, rng));
  const std::vector<std::string> all = obs.labels();
  CHECK(max_abs_diff(effect_of_event(obs, all), identity(3)) < 1e-12);
  CHECK(max_abs(effect_of_event(obs, std::vector<std::string>{})) == 0.0);
  const std::vector<std::string> x{"0"}, y{"2"}, xy{"0", "2"};
  const CMat sum = effect_of_event(obs, xy);
  CHECK(max_abs_diff(sum, effect_of_event(obs, x) + effect_of_event(obs, y)) < 1e-15);
  CHECK(loewner_leq(sum, identity(3)));

  // Additivity of X -> p(rho, A_X) over a partition.
  const State rho(random_density(3, rng));
  double total = 0.0;
  for (const auto& label : all) total += probability(rho, Effect(obs.effect(label)));
  CHECK(std::abs(total - 1.0) < 3 * kDefaultAtol);
}

TEST_CASE("operations and channels", "[objects]") {
  Rng rng(3);
  const CMat rho = random_density(3, rng);
  CHECK(max_abs_diff(KrausOperation::channel({identity(3)}).apply(rho), rho) == 0.0);

  const CMat u = random_unitary(3, rng);
  const RVec before = hermitian_eig(rho).values;
  const RVec after = hermitian_eig(KrausOperation::channel({u}).apply(rho)).values;
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);

  const auto kraus = random_kraus_channel(3, 3, rng);
  const KrausOperation op({kraus[0], kraus[1]});
  CHECK(apply_operation(op, State(rho)).trace().real() <= 1.0 + 1e-12);
  CHECK_THROWS_AS(KrausOperation::channel({kraus[0], kraus[1]}), ValidationError);
  CHECK_THROWS_AS(KrausOperation({2.0 * identity(2)}), ValidationError);
}

TEST_CASE("instrument determines its observable", "[objects]") {
  const Instrument trivial({{"only", KrausOperation({identity(2)})}});
  CHECK(max_abs_diff(measured_observable_of_instrument(trivial).effect("only"), identity(2)) == 0.0);

  const Instrument lueders({{"0", KrausOperation({projector(2, 0)})}, {"1", KrausOperation({projector(2, 1)})}});
  const Observable a = measured_observable_of_instrument(lueders);
  CHECK(max_abs_diff(a.effect("0"), projector(2, 0)) == 0.0);
  CHECK(max_abs_diff(a.effect("1"), projector(2, 1)) == 0.0);

  Rng rng(4);
  const auto kraus = random_kraus_channel(3, 4, rng);
  const Instrument inst({{"a", KrausOperation({kraus[0], kraus[1]})}, {"b", KrausOperation({kraus[2]})},
                         {"c", KrausOperation({kraus[3]})}});
  const Observable m = measured_observable_of_instrument(inst);
  for (int t = 0; t < 50; ++t) {
    const State rho(random_density(3, rng));
    for (std::size_t x = 0; x < inst.size(); ++x) {
      const double lhs = (rho.matrix() * m.effect(x)).trace().real();
      const double rhs = apply_operation(inst.operation(x), rho).trace().real();
      REQUIRE(std::abs(lhs - rhs) < 1e-10);
    }
    CHECK(std::abs(apply_operation(inst.total_channel(), rho).trace().real() - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(Instrument({{"a", KrausOperation({kraus[0]})}}), ValidationError);
}

TEST_CASE("dual channel", "[objects]") {
  Rng rng(5);
  const KrausOperation gamma = KrausOperation::channel(random_kraus_channel(3, 2, rng));
  CHECK(max_abs_diff(dual_channel(gamma, Effect(identity(3))).matrix(), identity(3)) < 1e-12);
  const CMat u = random_unitary(3, rng);
  const CMat f = random_effect(3, rng);
  CHECK(max_abs_diff(dual_channel(KrausOperation::channel({u}), Effect(f)).matrix(), u.adjoint() * f * u) < 1e-12);
  for (int t = 0; t < 20; ++t) {
    const CMat sigma = random_density(3, rng);
    const CMat a = random_effect(3, rng);
    const CMat b = random_effect(3, rng);
    const CMat dual = dual_channel(gamma, Effect(a)).matrix();
    CHECK(std::abs((gamma.apply(sigma) * a).trace() - (sigma * dual).trace()) < 1e-10);
    CHECK(is_psd(dual));
    const CMat lin = gamma.apply_dual(0.3 * a + 0.7 * b);
    CHECK(max_abs_diff(lin, 0.3 * dual + 0.7 * gamma.apply_dual(b)) < 1e-12);
  }
  CHECK_THROWS_AS(dual_channel(KrausOperation({0.5 * identity(2)}), Effect(identity(2))), ValidationError);
}

TEST_CASE("contexts", "[objects]") {
  Rng rng(6);
  const Context c(random_unitary(3, rng));
  CMat total = CMat::Zero(3, 3);
  for (const CMat& p : c.atoms()) {
    CHECK(is_projection(p));
    total += p;
  }
  CHECK(max_abs_diff(total, identity(3)) < 1e-12);
  const CMat rho = random_density(3, rng);
  CHECK(c.is_measurable(c.dephase(rho)));
  CHECK_FALSE(c.is_measurable(rho));
  CHECK_THROWS_AS(Context(2.0 * identity(2)), ValidationError);
  CHECK(Context::standard(3) == Context(identity(3)));
}
