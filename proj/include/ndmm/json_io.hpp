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

// JSON encodings.
//
//   CMat:        {"rows": n, "cols": m, "data": [[re, im], ...]}   (row-major)
//   Observable:  {"outcomes": [{"label": str, "effect": CMat}, ...]}
//   Instrument:  {"outcomes": [{"label": str, "kraus": [CMat, ...]}, ...]}
//   NDChannel:   {"context": CMat (basis as columns), "table": [[CMat, ...], ...]}
//
// Decoding reports structural problems as SchemaError with a JSON-pointer-like
// path; mathematical invariants are checked by the value types themselves.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ndmm/linalg.hpp"
#include "ndmm/nd_channel.hpp"
#include "ndmm/quantum_objects.hpp"

namespace ndmm {

using json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline const json& require_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

inline const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

inline double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline long long require_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<long long>();
}

inline std::string require_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace detail

inline json cmat_to_json(const CMat& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMat cmat_from_json(const json& j, const std::string& path = "") {
  const long long rows = detail::require_integer(detail::require_field(j, "rows", path), path + "/rows");
  const long long cols = detail::require_integer(detail::require_field(j, "cols", path), path + "/cols");
  if (rows < 1 || cols < 1) throw SchemaError(path, "rows and cols must be positive");
  const json& data = detail::require_array(detail::require_field(j, "data", path), path + "/data");
  if (static_cast<long long>(data.size()) != rows * cols) {
    throw SchemaError(path + "/data", "expected " + std::to_string(rows * cols) + " entries, got " +
                                          std::to_string(data.size()));
  }
  CMat m(rows, cols);
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const std::string p = path + "/data/" + std::to_string(idx);
    const json& z = data[idx];
    if (!z.is_array() || z.size() != 2) throw SchemaError(p, "expected [re, im]");
    const double re = detail::require_number(z[0], p + "/0");
    const double im = detail::require_number(z[1], p + "/1");
    if (!std::isfinite(re) || !std::isfinite(im)) throw SchemaError(p, "non-finite entry");
    m(static_cast<Eigen::Index>(idx) / cols, static_cast<Eigen::Index>(idx) % cols) = {re, im};
  }
  return m;
}

inline json observable_to_json(const Observable& obs) {
  json outcomes = json::array();
  for (const auto& o : obs.outcomes()) {
    outcomes.push_back({{"label", o.label}, {"effect", cmat_to_json(o.effect.matrix())}});
  }
  return json{{"outcomes", std::move(outcomes)}};
}

inline Observable observable_from_json(const json& j, const std::string& path = "",
                                       Tolerance tol = {}) {
  const json& arr = detail::require_array(detail::require_field(j, "outcomes", path), path + "/outcomes");
  std::vector<Observable::Outcome> outcomes;
  for (std::size_t x = 0; x < arr.size(); ++x) {
    const std::string p = path + "/outcomes/" + std::to_string(x);
    outcomes.push_back({detail::require_string(detail::require_field(arr[x], "label", p), p + "/label"),
                        Effect(cmat_from_json(detail::require_field(arr[x], "effect", p), p + "/effect"), tol)});
  }
  return Observable(std::move(outcomes), tol);
}

inline json instrument_to_json(const Instrument& inst) {
  json outcomes = json::array();
  for (const auto& o : inst.outcomes()) {
    json kraus = json::array();
    for (const CMat& s : o.operation.kraus()) kraus.push_back(cmat_to_json(s));
    outcomes.push_back({{"label", o.label}, {"kraus", std::move(kraus)}});
  }
  return json{{"outcomes", std::move(outcomes)}};
}

inline std::vector<CMat> cmat_list_from_json(const json& j, const std::string& path) {
  const json& arr = detail::require_array(j, path);
  std::vector<CMat> out;
  for (std::size_t k = 0; k < arr.size(); ++k) out.push_back(cmat_from_json(arr[k], path + "/" + std::to_string(k)));
  return out;
}

inline Instrument instrument_from_json(const json& j, const std::string& path = "",
                                       Tolerance tol = {}) {
  const json& arr = detail::require_array(detail::require_field(j, "outcomes", path), path + "/outcomes");
  std::vector<Instrument::Outcome> outcomes;
  for (std::size_t x = 0; x < arr.size(); ++x) {
    const std::string p = path + "/outcomes/" + std::to_string(x);
    outcomes.push_back({detail::require_string(detail::require_field(arr[x], "label", p), p + "/label"),
                        KrausOperation(cmat_list_from_json(detail::require_field(arr[x], "kraus", p), p + "/kraus"),
                                       KrausOperation::Kind::Operation, tol)});
  }
  return Instrument(std::move(outcomes), tol);
}

inline json nd_channel_to_json(const NDChannel& nd) {
  json table = json::array();
  for (const auto& row : nd.table()) {
    json r = json::array();
    for (const CMat& b : row) r.push_back(cmat_to_json(b));
    table.push_back(std::move(r));
  }
  return json{{"context", cmat_to_json(nd.context().basis())}, {"table", std::move(table)}};
}

inline NDChannel nd_channel_from_json(const json& j, const std::string& path = "",
                                      Tolerance tol = {}) {
  Context ctx(cmat_from_json(detail::require_field(j, "context", path), path + "/context"), tol);
  const json& rows = detail::require_array(detail::require_field(j, "table", path), path + "/table");
  NDChannel::Table table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.push_back(cmat_list_from_json(rows[i], path + "/table/" + std::to_string(i)));
  }
  return NDChannel(std::move(ctx), std::move(table), tol);
}

// ---------------------------------------------------------------------------
// Serialization with every float written as %.17g, which round-trips doubles
// exactly.

namespace detail {

inline void write_double(std::ostream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep it a JSON float so it decodes as one.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  os << s;
}

inline void write_json(std::ostream& os, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        newline(depth + 1);
        os << json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        write_json(os, it.value(), indent, depth + 1);
      }
      newline(depth);
      os << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Scalars-only arrays (such as [re, im] pairs) stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      os << '[';
      bool first = true;
      for (const json& e : j) {
        if (!first) os << (flat && indent >= 0 ? ", " : ",");
        first = false;
        if (!flat) newline(depth + 1);
        write_json(os, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      os << ']';
      return;
    }
    case json::value_t::number_float:
      write_double(os, j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Like json::dump, but floats are always emitted with 17 significant digits.
inline std::string dump17(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  return os.str();
}

}  // namespace ndmm
