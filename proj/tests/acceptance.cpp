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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ndmm.hpp"

using namespace ndmm;

namespace {

constexpr std::uint64_t kSeed = 20260415;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Max residual of a verify family at the given trial count and dimension bound.
double family_residual(const char* name, int trials, int max_dim) {
  return run_family(find_family(name), kSeed, trials, max_dim, 0.0).max_residual;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Outcome probe_round_trip() {
  const auto t0 = Clock::now();
  const double round_trip = family_residual("probe_round_trip", 200, 5);
  const double basis = family_residual("basis_independence", 200, 5);
  const double elapsed = seconds_since(t0);
  return {round_trip < 1e-10 && basis < 1e-10 && elapsed < 2.0,
          fmt("round trip %.2e, basis independence %.2e (limit 1e-10), %.2f s (limit 2 s)", round_trip, basis,
              elapsed)};
}

Outcome partial_traces() {
  const double ops = family_residual("partial_traces", 100, 5);
  const double product = family_residual("product_partial_traces", 100, 4);
  return {ops < 1e-10 && product < 1e-10,
          fmt("operators %.2e, channel outputs %.2e (limit 1e-10)", ops, product)};
}

Outcome classification() {
  // Each trial checks one positive and one negative instance of all five flags.
  const double mismatches = family_residual("classify", 100, 4);
  return {mismatches == 0.0, fmt("%.0f disagreements in 1000 instances (limit 0)", mismatches)};
}

Outcome conjugation() {
  const double r = family_residual("conjugation", 100, 4);
  return {r < 1e-10, fmt("max residual %.2e (limit 1e-10)", r)};
}

Outcome channel_equivalence() {
  const double r = family_residual("channel_round_trip", 100, 4);
  return {r < 1e-10, fmt("superoperator and commutator residual %.2e (limit 1e-10)", r)};
}

Outcome instrument_observable() {
  const double inst = family_residual("instrument", 100, 4);
  const double obs = family_residual("observable", 100, 4);
  return {inst < 1e-10 && obs < 1e-10, fmt("instrument %.2e, observable %.2e (limit 1e-10)", inst, obs)};
}

Outcome post_probe() {
  const double general = family_residual("post_probe", 100, 4);
  const double unitary = family_residual("unitary_specialization", 100, 4);
  return {general < 1e-10 && unitary < 1e-10,
          fmt("general %.2e, unitary tables %.2e (limit 1e-10)", general, unitary)};
}

Outcome commuting_eta() {
  const double r = family_residual("commuting_eta", 100, 4);
  return {r < 1e-10, fmt("max residual %.2e (limit 1e-10)", r)};
}

Outcome swap_example() {
  double sharp = 0.0;
  double channel = 0.0;
  double measurable = 0.0;
  Rng rng(derive_seed(kSeed, "acceptance/swap"));
  for (int n : {2, 3}) {
    const MeasurementModel mm = build_swap_mm({n, sharp_probe(n), std::nullopt});
    const Observable m = measured_observable_nd(mm);
    const Observable direct = measured_observable_direct(mm);
    for (int x = 0; x < n; ++x) {
      const CMat p = outer(basis_vector(n, x), basis_vector(n, x));
      sharp = std::max({sharp, max_abs_diff(m.effect(static_cast<std::size_t>(x)), p),
                        max_abs_diff(direct.effect(static_cast<std::size_t>(x)), p)});
    }
    for (int t = 0; t < 20; ++t) {
      const State rho(random_density(n, rng));
      channel = std::max(channel, max_abs_diff(apply_product(mm.nd(), rho, mm.eta()), swap_channel_closed_form(rho.matrix())));
      // Context-measurable input sum_i lambda_i P_i.
      RVec lambda(n);
      for (int i = 0; i < n; ++i) lambda(i) = rng.uniform() + 0.01;
      lambda /= lambda.sum();
      CMat rho_c = CMat::Zero(n, n), expected = CMat::Zero(n * n, n * n);
      for (int i = 0; i < n; ++i) {
        const CMat p = outer(basis_vector(n, i), basis_vector(n, i));
        rho_c += lambda(i) * p;
        expected += lambda(i) * kron(p, p);
      }
      measurable = std::max(measurable, max_abs_diff(apply_product(mm.nd(), State(rho_c), mm.eta()), expected));
      const MeasurementModel random_probe = mm.with_probe(random_observable(n, 3, rng));
      for (std::size_t x = 0; x < 3; ++x) {
        const CMat& fx = random_probe.probe().effect(x);
        CMat inst_expected = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i) inst_expected += lambda(i) * fx(i, i) * outer(basis_vector(n, i), basis_vector(n, i));
        measurable = std::max(measurable, max_abs_diff(measured_instrument_nd(random_probe, random_probe.probe().label(x),
                                                                              State(rho_c)),
                                                       inst_expected));
      }
    }
  }
  return {sharp < 1e-12 && channel < 1e-10 && measurable < 1e-10,
          fmt("sharp probe %.2e (limit 1e-12), channel form %.2e, measurable inputs %.2e (limit 1e-10)", sharp,
              channel, measurable)};
}

Outcome fourier_example() {
  double diagonal = 0.0;
  double oracle = 0.0;
  Rng rng(derive_seed(kSeed, "acceptance/fourier"));
  for (auto [n, m] : {std::pair{2, 3}, std::pair{2, 5}, std::pair{4, 5}}) {
    for (int t = 0; t < 10; ++t) {
      std::vector<CMat> diag(3, CMat::Zero(m, m));
      for (int s = 0; s < m; ++s) {
        const double a = rng.uniform(), b = rng.uniform() * (1.0 - a);
        diag[0](s, s) = a;
        diag[1](s, s) = b;
        diag[2](s, s) = 1.0 - a - b;
      }
      const MeasurementModel mm = build_fourier_mm({n, m, Observable::from_matrices(diag), std::nullopt});
      const Observable obs = measured_observable_nd(mm);
      for (std::size_t x = 0; x < 3; ++x) {
        diagonal = std::max(diagonal, max_abs_diff(obs.effect(x), average_eigenvalue(diag[x]) * identity(n)));
      }

      const MeasurementModel rnd = mm.with_probe(random_observable(m, 3, rng));
      const Observable direct = measured_observable_direct(rnd);
      const State rho(random_density(n, rng));
      for (std::size_t x = 0; x < 3; ++x) {
        const CMat& fx = rnd.probe().effect(x);
        oracle = std::max(oracle, max_abs_diff(fourier_instrument_closed_form(fx, rho.matrix()),
                                               measured_instrument_direct(rnd, rnd.probe().label(x), rho)));
        oracle = std::max(oracle, max_abs_diff(fourier_observable_closed_form(fx, n), direct.effect(x)));
      }
    }
  }
  bool rejected = false;
  try {
    build_fourier_mm({2, 2, sharp_probe(2), std::nullopt});
  } catch (const NonUnitaryFourierError& e) {
    rejected = e.j() == 2;
  }
  return {diagonal < 1e-9 && oracle < 1e-9 && rejected,
          fmt("diagonal probe %.2e, closed forms vs direct %.2e (limit 1e-9), ", diagonal, oracle) +
              (rejected ? "(n,m)=(2,2) rejected" : "(n,m)=(2,2) NOT rejected")};
}

Outcome remeasurement() {
  const double closed = family_residual("remeasurement", 50, 4);
  const double unitary = family_residual("unitary_specialization", 50, 4);
  return {closed < 1e-10 && unitary < 1e-10,
          fmt("closed form vs substitution %.2e, unitary display %.2e (limit 1e-10)", closed, unitary)};
}

Outcome determinism() {
  const auto t0 = Clock::now();
  const VerifySummary a = verify_suite(42, 100, 4, 1e-9);
  const double elapsed = seconds_since(t0);
  const VerifySummary b = verify_suite(42, 100, 4, 1e-9);
  const bool identical = a.text == b.text;
  if (!a.pass) std::fputs(a.text.c_str(), stdout);
  return {identical && a.pass && elapsed < 60.0,
          std::string(identical ? "identical summaries" : "summaries DIFFER") + (a.pass ? ", all families pass" : ", families FAIL") +
              fmt(", full suite %.2f s (limit 60 s)", elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"probe round trip and basis independence", probe_round_trip},
      {"partial-trace closed forms", partial_traces},
      {"classification equivalences", classification},
      {"conjugation identity", conjugation},
      {"nondisturbing channel equivalence", channel_equivalence},
      {"measured instrument and observable", instrument_observable},
      {"post-interaction probe", post_probe},
      {"commuting probe state", commuting_eta},
      {"swap example", swap_example},
      {"fourier example", fourier_example},
      {"remeasurement", remeasurement},
      {"determinism and runtime", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
