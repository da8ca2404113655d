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


#include <fstream>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "ndmm/json_io.hpp"
#include "ndmm/random.hpp"
#include "ndmm/scenario.hpp"
#include "ndmm/verify.hpp"

using namespace ndmm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kScenarioDir = NDMM_SOURCE_DIR "/scenarios/";
const std::string kDataDir = NDMM_SOURCE_DIR "/tests/data/";

}  // namespace

TEST_CASE("matrices round-trip through JSON exactly", "[json]") {
  Rng rng(1);
  const CMat m = random_ginibre(3, 2, rng);
  const json j = json::parse(dump17(cmat_to_json(m)));
  CHECK(cmat_from_json(j) == m);
  CHECK_THROWS_AS(cmat_from_json(json{{"rows", 2}, {"cols", 2}, {"data", json::array()}}, "/x"), SchemaError);
  CHECK_THROWS_AS(cmat_from_json(json{{"rows", 1}, {"cols", 1}}), SchemaError);
  try {
    cmat_from_json(json{{"rows", 1}, {"cols", 1}, {"data", {{1.0, "x"}}}}, "/eta");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "/eta/data/0/1");
  }
}

TEST_CASE("dump17 writes floats with 17 significant digits", "[json]") {
  CHECK(dump17(json(0.1), -1) == "0.10000000000000001");
  CHECK(dump17(json(1.0), -1) == "1.0");
  CHECK(dump17(json::array({1, 2.5}), -1) == "[1,2.5]");
  CHECK(json::parse(dump17(json(1.0 / 3.0))).get<double>() == 1.0 / 3.0);
}

TEST_CASE("observables, instruments and tables round-trip", "[json]") {
  Rng rng(2);
  const Observable obs = random_observable(3, 3, rng);
  const Observable back = observable_from_json(json::parse(dump17(observable_to_json(obs))));
  REQUIRE(back.size() == obs.size());
  for (std::size_t x = 0; x < obs.size(); ++x) {
    CHECK(back.label(x) == obs.label(x));
    CHECK(back.effect(x) == obs.effect(x));
  }

  const auto kraus = random_kraus_channel(2, 3, rng);
  const Instrument inst({{"a", KrausOperation({kraus[0]})}, {"b", KrausOperation({kraus[1], kraus[2]})}});
  const Instrument inst_back = instrument_from_json(json::parse(dump17(instrument_to_json(inst))));
  CHECK(inst_back.operation(1).kraus()[1] == kraus[2]);

  const NDChannel nd = random_nd_channel(Context(random_unitary(2, rng)), 3, 2, rng);
  const NDChannel nd_back = nd_channel_from_json(json::parse(dump17(nd_channel_to_json(nd))));
  CHECK(nd_back.superoperator() == nd.superoperator());
}

TEST_CASE("reports round-trip", "[json]") {
  Rng rng(3);
  Report r;
  r.tolerance = 1e-9;
  r.seed = 42;
  r.add_result("observable", "0", random_ginibre(2, 2, rng));
  r.add_residual("a", 1.0 / 3.0 * 1e-12);
  r.add_residual("b", 2e-3);
  CHECK_FALSE(r.pass);
  const Report back = report_from_json(json::parse(dump17(report_to_json(r))));
  CHECK(back == r);

  const RunOutcome out = run_scenario_text(slurp(kScenarioDir + "fourier_n2_m3.json"), 1e-9);
  REQUIRE(out.report);
  CHECK(report_from_json(json::parse(dump17(report_to_json(*out.report)))) == *out.report);
}

TEST_CASE("swap scenario reports the context projections", "[json]") {
  const RunOutcome out = run_scenario_text(slurp(kScenarioDir + "swap_n2.json"), 1e-10);
  INFO(out.message);
  REQUIRE(out.code == kExitOk);
  REQUIRE(out.report);
  const Report& r = *out.report;
  CHECK(r.pass);
  CHECK(r.seed == 1u);
  int found = 0;
  for (const ReportEntry& e : r.results) {
    if (e.request != "observable") continue;
    const Eigen::Index x = std::stoi(e.name);
    CMat p = CMat::Zero(2, 2);
    p(x, x) = 1.0;
    CHECK(max_abs_diff(e.value, p) < 1e-12);
    ++found;
  }
  CHECK(found == 2);
  for (const Residual& res : r.residuals) {
    INFO(res.name);
    CHECK(res.value >= 0.0);
    CHECK(res.value < 1e-10);
  }
}

TEST_CASE("scenario exit codes", "[json]") {
  CHECK(run_scenario_text(slurp(kDataDir + "malformed.json"), 1e-9).code == kExitParseError);
  const RunOutcome missing = run_scenario_text(slurp(kDataDir + "missing_field.json"), 1e-9);
  CHECK(missing.code == kExitParseError);
  CHECK_THAT(missing.message, Catch::Matchers::ContainsSubstring("eta"));
  const RunOutcome non_nd = run_scenario_text(slurp(kDataDir + "non_nd_observable.json"), 1e-9);
  CHECK(non_nd.code == kExitValidationError);
  CHECK_THAT(non_nd.message, Catch::Matchers::ContainsSubstring("nondisturbing"));
  CHECK(run_scenario_text(slurp(kDataDir + "incomplete_row.json"), 1e-9).code == kExitValidationError);
  CHECK(run_scenario_text(slurp(kScenarioDir + "kraus_direct.json"), 1e-9).code == kExitOk);
  CHECK(run_scenario_text(slurp(kScenarioDir + "explicit_nd.json"), 1e-9).code == kExitOk);
  CHECK(run_scenario_text(R"({"example": {"name": "cube", "n": 2}, "requests": []})", 1e-9).code == kExitParseError);
  CHECK(run_scenario_text(R"({"example": {"name": "swap", "n": 2}, "requests": ["teleport"]})", 1e-9).code ==
        kExitParseError);
  CHECK(run_scenario_text(R"({"requests": []})", 1e-9).code == kExitParseError);
  CHECK(run_scenario_text(R"({"example": {"name": "fourier", "n": 2, "m": 4}, "requests": []})", 1e-9).code ==
        kExitValidationError);
  CHECK(run_scenario_text(R"({"example": {"name": "swap", "n": 2}, "dimK": 3, "requests": []})", 1e-9).code ==
        kExitValidationError);
}

TEST_CASE("scenarios are deterministic", "[json]") {
  const std::string text = slurp(kScenarioDir + "explicit_nd.json");
  const RunOutcome a = run_scenario_text(text, 1e-9);
  const RunOutcome b = run_scenario_text(text, 1e-9);
  REQUIRE(a.report);
  REQUIRE(b.report);
  CHECK(dump17(report_to_json(*a.report)) == dump17(report_to_json(*b.report)));
}
