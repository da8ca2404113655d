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

// Scenario files describe one measurement model plus the quantities to compute:
//
//   {
//     "dimH": n, "dimK": m, "eta": CMat,
//     "channel": {"kind": "nd", "context": CMat, "table": [[CMat, ...], ...]}
//              | {"kind": "kraus", "kraus": [CMat, ...]},
//     "probe": Observable,
//     "inputs": [CMat, ...],          // states on H (default: I/n)
//     "probe_inputs": [CMat, ...],    // states on K for post_probe (default: eta)
//     "requests": ["instrument", "observable", "post_probe", "remeasure"],
//     "seed": integer                 // optional, echoed into the report
//   }
//
// Instead of "channel" a scenario may name a built-in model:
//   "example": {"name": "swap", "n": 2, "probe": "sharp" | Observable}
//   "example": {"name": "fourier", "n": 2, "m": 3, "probe": "sharp" | Observable}
// in which case dimH, dimK, eta and probe are optional.
//
// Every computed quantity that has an independent second route is reported
// together with the residual between the two routes.

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ndmm/example_models.hpp"
#include "ndmm/json_io.hpp"
#include "ndmm/measurement_model.hpp"

namespace ndmm {

enum ExitCode : int {
  kExitOk = 0,
  kExitNumericalFailure = 1,
  kExitParseError = 2,
  kExitValidationError = 3,
};

struct ReportEntry {
  std::string request;
  std::string name;
  CMat value;

  bool operator==(const ReportEntry& o) const {
    return request == o.request && name == o.name && value.rows() == o.value.rows() &&
           value.cols() == o.value.cols() && value == o.value;
  }
};

struct Residual {
  std::string name;
  double value = 0.0;
  bool pass = false;

  bool operator==(const Residual&) const = default;
};

struct Report {
  double tolerance = kDefaultAtol;
  std::optional<std::uint64_t> seed;
  std::vector<ReportEntry> results;
  std::vector<Residual> residuals;
  bool pass = true;

  void add_result(std::string request, std::string name, CMat value) {
    results.push_back({std::move(request), std::move(name), std::move(value)});
  }

  void add_residual(std::string name, double value) {
    const bool ok = value >= 0.0 && value <= tolerance;
    residuals.push_back({std::move(name), value, ok});
    pass = pass && ok;
  }

  bool operator==(const Report&) const = default;
};

inline json report_to_json(const Report& r) {
  json results = json::array();
  for (const ReportEntry& e : r.results) {
    results.push_back({{"request", e.request}, {"name", e.name}, {"matrix", cmat_to_json(e.value)}});
  }
  json residuals = json::array();
  for (const Residual& res : r.residuals) {
    residuals.push_back({{"name", res.name}, {"value", res.value}, {"pass", res.pass}});
  }
  json out{{"tolerance", r.tolerance},
           {"seed", r.seed ? json(*r.seed) : json(nullptr)},
           {"results", std::move(results)},
           {"residuals", std::move(residuals)},
           {"pass", r.pass}};
  return out;
}

inline Report report_from_json(const json& j) {
  Report r;
  r.tolerance = detail::require_number(detail::require_field(j, "tolerance", ""), "/tolerance");
  const json& seed = detail::require_field(j, "seed", "");
  if (!seed.is_null()) r.seed = seed.get<std::uint64_t>();
  const json& results = detail::require_array(detail::require_field(j, "results", ""), "/results");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string p = "/results/" + std::to_string(i);
    r.results.push_back({detail::require_string(detail::require_field(results[i], "request", p), p),
                         detail::require_string(detail::require_field(results[i], "name", p), p),
                         cmat_from_json(detail::require_field(results[i], "matrix", p), p + "/matrix")});
  }
  const json& residuals = detail::require_array(detail::require_field(j, "residuals", ""), "/residuals");
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const std::string p = "/residuals/" + std::to_string(i);
    const json& pass = detail::require_field(residuals[i], "pass", p);
    if (!pass.is_boolean()) throw SchemaError(p + "/pass", "expected a boolean");
    r.residuals.push_back({detail::require_string(detail::require_field(residuals[i], "name", p), p),
                           detail::require_number(detail::require_field(residuals[i], "value", p), p),
                           pass.get<bool>()});
  }
  const json& pass = detail::require_field(j, "pass", "");
  if (!pass.is_boolean()) throw SchemaError("/pass", "expected a boolean");
  r.pass = pass.get<bool>();
  return r;
}

/// Error carrying the CLI exit code it maps to.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

struct Scenario {
  MeasurementModel model;
  std::vector<State> inputs;
  std::vector<State> probe_inputs;
  std::vector<std::string> requests;
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline Observable probe_from_json(const json& j, Eigen::Index dim, const std::string& path,
                                  Tolerance tol) {
  if (j.is_string()) {
    if (j.get<std::string>() != "sharp") throw SchemaError(path, "probe must be \"sharp\" or an Observable");
    return sharp_probe(dim);
  }
  return observable_from_json(j, path, tol);
}

inline MeasurementModel example_model_from_json(const json& root, Tolerance tol) {
  const json& ex = root.at("example");
  const std::string name = require_string(require_field(ex, "name", "/example"), "/example/name");
  const int n = static_cast<int>(require_integer(require_field(ex, "n", "/example"), "/example/n"));
  std::optional<CMat> eta;
  if (root.contains("eta")) eta = cmat_from_json(root["eta"], "/eta");
  const json* probe = ex.contains("probe") ? &ex["probe"] : root.contains("probe") ? &root["probe"] : nullptr;
  const std::string probe_path = ex.contains("probe") ? "/example/probe" : "/probe";
  if (name == "swap") {
    SwapSpec spec{n, probe ? probe_from_json(*probe, n, probe_path, tol) : sharp_probe(n), eta};
    return build_swap_mm(spec);
  }
  if (name == "fourier") {
    const int m = static_cast<int>(require_integer(require_field(ex, "m", "/example"), "/example/m"));
    if (m < 2) throw ValidationError("fourier example requires m >= 2");
    FourierSpec spec{n, m, probe ? probe_from_json(*probe, m, probe_path, tol) : sharp_probe(m), eta};
    return build_fourier_mm(spec);
  }
  throw SchemaError("/example/name", "unknown example '" + name + "' (expected swap or fourier)");
}

inline MeasurementModel explicit_model_from_json(const json& root, Tolerance tol) {
  const auto dimH = static_cast<Eigen::Index>(require_integer(require_field(root, "dimH", ""), "/dimH"));
  const auto dimK = static_cast<Eigen::Index>(require_integer(require_field(root, "dimK", ""), "/dimK"));
  if (dimH < 1 || dimK < 1) throw SchemaError("/dimH", "dimensions must be positive");
  State eta(cmat_from_json(require_field(root, "eta", ""), "/eta"), tol);
  Observable probe = probe_from_json(require_field(root, "probe", ""), dimK, "/probe", tol);
  const json& ch = require_field(root, "channel", "");
  const std::string kind = require_string(require_field(ch, "kind", "/channel"), "/channel/kind");
  if (kind == "nd") {
    return MeasurementModel(dimH, std::move(eta), nd_channel_from_json(ch, "/channel", tol), std::move(probe));
  }
  if (kind == "kraus") {
    KrausOperation nu = KrausOperation::channel(
        cmat_list_from_json(require_field(ch, "kraus", "/channel"), "/channel/kraus"), tol);
    return MeasurementModel(dimH, std::move(eta), std::move(nu), std::move(probe));
  }
  throw SchemaError("/channel/kind", "unknown channel kind '" + kind + "' (expected nd or kraus)");
}

inline std::vector<State> states_from_json(const json& root, const char* key, const State& fallback,
                                           Tolerance tol) {
  std::vector<State> out;
  if (!root.contains(key)) {
    out.push_back(fallback);
    return out;
  }
  const std::string path = std::string("/") + key;
  for (const CMat& m : cmat_list_from_json(root[key], path)) out.emplace_back(m, tol);
  return out;
}

}  // namespace detail

inline constexpr const char* kKnownRequests[] = {"instrument", "observable", "post_probe", "remeasure"};

/// Decodes and validates a scenario. Throws SchemaError for structural
/// problems and ValidationError / DimensionError for violated invariants.
inline Scenario scenario_from_json(const json& root, Tolerance tol = {}) {
  if (!root.is_object()) throw SchemaError("/", "scenario must be a JSON object");
  const bool has_channel = root.contains("channel");
  const bool has_example = root.contains("example");
  if (has_channel == has_example) {
    throw SchemaError("/", "exactly one of \"channel\" or \"example\" must be present");
  }
  MeasurementModel mm = has_example ? detail::example_model_from_json(root, tol)
                                    : detail::explicit_model_from_json(root, tol);
  if (has_example) {
    if (root.contains("dimH") && detail::require_integer(root["dimH"], "/dimH") != mm.dimH()) {
      throw DimensionError("dimH does not match the example model");
    }
    if (root.contains("dimK") && detail::require_integer(root["dimK"], "/dimK") != mm.dimK()) {
      throw DimensionError("dimK does not match the example model");
    }
  }
  const State mixed(identity(mm.dimH()) / static_cast<double>(mm.dimH()));
  Scenario s{mm, detail::states_from_json(root, "inputs", mixed, tol),
             detail::states_from_json(root, "probe_inputs", mm.eta(), tol), {}, std::nullopt};
  for (const State& rho : s.inputs) {
    if (rho.dim() != mm.dimH()) throw DimensionError("input state does not act on H");
  }
  for (const State& sigma : s.probe_inputs) {
    if (sigma.dim() != mm.dimK()) throw DimensionError("probe input state does not act on K");
  }
  const json& requests = detail::require_array(detail::require_field(root, "requests", ""), "/requests");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    std::string r = detail::require_string(requests[i], "/requests/" + std::to_string(i));
    if (std::find(std::begin(kKnownRequests), std::end(kKnownRequests), r) == std::end(kKnownRequests)) {
      throw SchemaError("/requests/" + std::to_string(i), "unknown request '" + r + "'");
    }
    s.requests.push_back(std::move(r));
  }
  if (root.contains("seed")) s.seed = root["seed"].get<std::uint64_t>();
  return s;
}

namespace detail {

inline double negativity(const CMat& m) {
  const CMat h = 0.5 * (m + m.adjoint());
  return std::max(0.0, -hermitian_eig(h, Tolerance{1.0}).values(0));
}

inline std::string input_name(std::size_t r) { return "input[" + std::to_string(r) + "]"; }

inline void require_nd(const MeasurementModel& mm, const std::string& request) {
  if (!mm.is_nondisturbing()) {
    throw ScenarioError(kExitValidationError,
                        "request '" + request +
                            "' needs the closed form, which requires a context-nondisturbing "
                            "channel (channel kind \"nd\")");
  }
}

inline void run_instrument(const Scenario& s, Report& rep) {
  const MeasurementModel& mm = s.model;
  for (std::size_t r = 0; r < s.inputs.size(); ++r) {
    double total = 0.0;
    for (const std::string& x : mm.probe().labels()) {
      const std::string base = input_name(r) + "/" + x;
      const CMat direct = measured_instrument_direct(mm, x, s.inputs[r]);
      rep.add_result("instrument", base + "/direct", direct);
      rep.add_residual("instrument/" + base + "/negativity", negativity(direct));
      total += direct.trace().real();
      if (mm.is_nondisturbing()) {
        const CMat closed = measured_instrument_nd(mm, x, s.inputs[r]);
        rep.add_result("instrument", base + "/closed_form", closed);
        rep.add_residual("instrument/" + base + "/closed_form_vs_direct", max_abs_diff(closed, direct));
      }
    }
    rep.add_residual("instrument/" + input_name(r) + "/trace_defect", std::abs(total - 1.0));
  }
}

inline void run_observable(const Scenario& s, Report& rep, Tolerance tol) {
  const MeasurementModel& mm = s.model;
  require_nd(mm, "observable");
  const Observable closed = measured_observable_nd(mm, tol);
  const Observable direct = measured_observable_direct(mm, tol);
  CMat total = CMat::Zero(mm.dimH(), mm.dimH());
  double worst_commutator = 0.0;
  double worst_measurability = 0.0;
  for (std::size_t x = 0; x < closed.size(); ++x) {
    const CMat& m = closed.effect(x);
    rep.add_result("observable", closed.label(x), m);
    rep.add_residual("observable/" + closed.label(x) + "/closed_form_vs_direct",
                     max_abs_diff(m, direct.effect(x)));
    total += m;
    worst_measurability = std::max(worst_measurability, mm.nd().context().measurability_defect(m));
    for (std::size_t y = x + 1; y < closed.size(); ++y) {
      worst_commutator = std::max(worst_commutator, max_abs(commutator(m, closed.effect(y))));
    }
  }
  rep.add_residual("observable/completeness", max_abs(total - identity(mm.dimH())));
  rep.add_residual("observable/max_commutator", worst_commutator);
  rep.add_residual("observable/context_off_diagonal", worst_measurability);
}

inline void run_post_probe(const Scenario& s, Report& rep, Tolerance tol) {
  const MeasurementModel& mm = s.model;
  for (std::size_t r = 0; r < s.inputs.size(); ++r) {
    std::optional<Observable> observable;
    if (mm.is_nondisturbing()) {
      observable = post_probe_observable(mm, s.inputs[r], tol);
      CMat total = CMat::Zero(mm.dimK(), mm.dimK());
      for (std::size_t x = 0; x < observable->size(); ++x) {
        rep.add_result("post_probe", input_name(r) + "/observable/" + observable->label(x), observable->effect(x));
        total += observable->effect(x);
      }
      rep.add_residual("post_probe/" + input_name(r) + "/observable_completeness",
                       max_abs(total - identity(mm.dimK())));
    }
    for (std::size_t q = 0; q < s.probe_inputs.size(); ++q) {
      const std::string pair = input_name(r) + "/probe_input[" + std::to_string(q) + "]";
      double total = 0.0;
      for (const std::string& x : mm.probe().labels()) {
        const std::string base = pair + "/" + x;
        const CMat direct = post_probe_instrument_direct(mm, s.inputs[r], x, s.probe_inputs[q], tol);
        rep.add_result("post_probe", base + "/direct", direct);
        rep.add_residual("post_probe/" + base + "/hermiticity", hermiticity_defect(direct));
        total += direct.trace().real();
        if (observable) {
          const CMat closed = post_probe_instrument_nd(mm, s.inputs[r], x, s.probe_inputs[q], tol);
          rep.add_result("post_probe", base + "/closed_form", closed);
          rep.add_residual("post_probe/" + base + "/closed_form_vs_direct", max_abs_diff(closed, direct));
          const double paired = (s.probe_inputs[q].matrix() * observable->effect(x)).trace().real();
          rep.add_residual("post_probe/" + base + "/duality", std::abs(paired - closed.trace().real()));
        }
      }
      rep.add_residual("post_probe/" + pair + "/trace_defect", std::abs(total - 1.0));
    }
  }
}

inline void run_remeasure(const Scenario& s, Report& rep, Tolerance tol) {
  const MeasurementModel& mm = s.model;
  require_nd(mm, "remeasure");
  const Apparatus b = remeasure_apparatus(mm);
  const Apparatus a = apparatus_from_mm(mm);
  for (std::size_t r = 0; r < s.inputs.size(); ++r) {
    const Observable second = b.observable(s.inputs[r], tol);
    const Observable substituted = measured_observable_nd(state_dependent_model(mm, a, s.inputs[r], tol), tol);
    CMat total = CMat::Zero(mm.dimH(), mm.dimH());
    for (std::size_t x = 0; x < second.size(); ++x) {
      rep.add_result("remeasure", input_name(r) + "/" + second.label(x), second.effect(x));
      rep.add_residual("remeasure/" + input_name(r) + "/" + second.label(x) + "/closed_form_vs_substitution",
                       max_abs_diff(second.effect(x), substituted.effect(x)));
      total += second.effect(x);
    }
    rep.add_residual("remeasure/" + input_name(r) + "/completeness", max_abs(total - identity(mm.dimH())));
  }
}

}  // namespace detail

/// Evaluates every request of a scenario. Requests that need a closed form on
/// a generic Kraus channel throw ScenarioError(kExitValidationError).
inline Report run_scenario(const Scenario& s, double tolerance) {
  Report rep;
  rep.tolerance = tolerance;
  rep.seed = s.seed;
  const Tolerance tol{std::max(tolerance, kDefaultAtol)};
  for (const std::string& request : s.requests) {
    if (request == "instrument") detail::run_instrument(s, rep);
    else if (request == "observable") detail::run_observable(s, rep, tol);
    else if (request == "post_probe") detail::run_post_probe(s, rep, tol);
    else if (request == "remeasure") detail::run_remeasure(s, rep, tol);
  }
  return rep;
}

struct RunOutcome {
  ExitCode code = kExitOk;
  std::string message;
  std::optional<Report> report;
};

/// Parses, validates and runs a scenario given as JSON text. Never throws;
/// every failure is mapped onto the exit-code contract.
inline RunOutcome run_scenario_text(const std::string& text, double tolerance) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    return {kExitParseError, "parse error at byte " + std::to_string(e.byte) + ": " + e.what(), std::nullopt};
  }
  try {
    const Scenario s = scenario_from_json(root, Tolerance{std::max(tolerance, kDefaultAtol)});
    Report rep = run_scenario(s, tolerance);
    const ExitCode code = rep.pass ? kExitOk : kExitNumericalFailure;
    return {code, rep.pass ? "all checks passed" : "numerical check failed", std::move(rep)};
  } catch (const SchemaError& e) {
    return {kExitParseError, std::string("schema error at ") + e.what(), std::nullopt};
  } catch (const ScenarioError& e) {
    return {e.code(), e.what(), std::nullopt};
  } catch (const json::exception& e) {
    return {kExitParseError, e.what(), std::nullopt};
  } catch (const std::invalid_argument& e) {
    return {kExitValidationError, std::string("validation error: ") + e.what(), std::nullopt};
  } catch (const std::out_of_range& e) {
    return {kExitValidationError, std::string("validation error: ") + e.what(), std::nullopt};
  }
}

}  // namespace ndmm
