/*
 * Copyright 2026 The xbandit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// JSON records and CSV text for distributions, constructions, policies and
// reports. Arms and sequence indices are 1-based in every serialized form.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "xbandit/construction.hpp"
#include "xbandit/distribution.hpp"
#include "xbandit/engine.hpp"
#include "xbandit/error.hpp"
#include "xbandit/oracles.hpp"
#include "xbandit/policy.hpp"
#include "xbandit/regret.hpp"
#include "xbandit/verify.hpp"

namespace xbandit {

using Json = nlohmann::ordered_json;

// 17 significant digits; non-finite values as inf / -inf / nan.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

[[noreturn]] inline void config_error(const std::string& path, const std::string& msg) {
  fail(ErrorCode::kConfigInvalid, (path.empty() ? std::string("/") : path) + ": " + msg);
}

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) config_error(path + "/" + key, "missing");
  return *it;
}

inline double number_at(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return kNegInf;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  config_error(path, "expected a number");
}

inline std::uint64_t count_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    config_error(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

inline std::size_t one_based_at(const Json& j, const std::string& path, std::size_t limit) {
  const auto v = count_at(j, path);
  if (v < 1 || v > limit) config_error(path, "index must lie in 1.." + std::to_string(limit));
  return static_cast<std::size_t>(v - 1);
}

// ---- distributions --------------------------------------------------------

inline Json to_json(const Distribution& d) {
  Json j;
  if (d.is_continuous()) {
    j["kind"] = "uniform01";
    return j;
  }
  j["kind"] = "discrete";
  j["atoms"] = Json::array();
  for (std::size_t k = 0; k < d.size(); ++k)
    j["atoms"].push_back({{"value", d.support()[k]}, {"prob", d.prob(k)}});
  return j;
}

inline Distribution distribution_from_json(const Json& j, const std::string& path = "") {
  const auto& kind = field(j, "kind", path);
  if (kind == "uniform01") return Distribution::uniform01();
  if (kind != "discrete") config_error(path + "/kind", "expected \"discrete\" or \"uniform01\"");
  const auto& atoms = field(j, "atoms", path);
  if (!atoms.is_array() || atoms.empty()) config_error(path + "/atoms", "expected a nonempty array");
  std::vector<Atom> out;
  for (std::size_t n = 0; n < atoms.size(); ++n) {
    const std::string p = path + "/atoms/" + std::to_string(n);
    out.push_back({number_at(field(atoms[n], "value", p), p + "/value"),
                   number_at(field(atoms[n], "prob", p), p + "/prob")});
  }
  try {
    return make_discrete(out);
  } catch (const Error& e) {
    config_error(path, e.what());
  }
}

inline Json to_json(const ArmTuple& t) {
  Json arms = Json::array();
  for (const auto& d : t.arms) arms.push_back(to_json(d));
  return {{"arms", arms}};
}

inline ArmTuple tuple_from_json(const Json& j, const std::string& path = "") {
  const auto& arms = field(j, "arms", path);
  if (!arms.is_array() || arms.empty()) config_error(path + "/arms", "expected a nonempty array");
  ArmTuple t;
  for (std::size_t k = 0; k < arms.size(); ++k)
    t.arms.push_back(distribution_from_json(arms[k], path + "/arms/" + std::to_string(k)));
  return t;
}

// ---- constructions --------------------------------------------------------

/// {"K": 2, "alphas": "desk" | "canonical" | [numbers or "canonical:i"],
///  "I_max": n} or {"K": 2, "log_alphas": [...]}.
inline AlphaSequence alpha_sequence_from_json(const Json& j, const std::string& path = "") {
  const auto arms = static_cast<std::size_t>(count_at(field(j, "K", path), path + "/K"));
  if (arms < 1) config_error(path + "/K", "need at least one arm");
  try {
    if (j.contains("log_alphas")) {
      const auto& la = j["log_alphas"];
      if (!la.is_array()) config_error(path + "/log_alphas", "expected an array");
      std::vector<double> logs;
      for (std::size_t n = 0; n < la.size(); ++n)
        logs.push_back(number_at(la[n], path + "/log_alphas/" + std::to_string(n)));
      return sequence_from_logs(arms, std::move(logs));
    }
    const auto& a = field(j, "alphas", path);
    if (a.is_string()) {
      if (a == "desk") return desk_preset(arms);
      if (a == "canonical") {
        const std::size_t len = j.contains("I_max") ? count_at(j["I_max"], path + "/I_max") : 4;
        return canonical_sequence(arms, len);
      }
      config_error(path + "/alphas", "expected \"desk\", \"canonical\" or an array");
    }
    if (!a.is_array() || a.empty()) config_error(path + "/alphas", "expected a nonempty array");
    std::vector<double> logs;
    bool all_canonical = true;
    for (std::size_t n = 0; n < a.size(); ++n) {
      const std::string p = path + "/alphas/" + std::to_string(n);
      if (a[n].is_string() && a[n].get<std::string>().rfind("canonical:", 0) == 0) {
        const auto idx = std::stoul(a[n].get<std::string>().substr(10));
        logs.push_back(canonical_alpha(arms, idx));
        continue;
      }
      all_canonical = false;
      const double v = number_at(a[n], p);
      if (!(v > 0.0 && v < 1.0)) config_error(p, "alpha must lie in (0, 1)");
      logs.push_back(std::log(v));
    }
    return sequence_from_logs(arms, std::move(logs),
                              all_canonical ? AlphaSource::kCanonical : AlphaSource::kUser);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    config_error(path, e.what());
  }
}

inline Json to_json(const AlphaSequence& a) {
  Json logs = Json::array();
  Json values = Json::array();
  for (double la : a.log_alphas) {
    logs.push_back(format_number(la));
    values.push_back(std::exp(la));
  }
  return {{"K", a.arms},
          {"source", a.source == AlphaSource::kCanonical ? "canonical" : "user"},
          {"alphas", values},
          {"log_alphas", logs}};
}

inline Json to_json(const BAssignment& b) {
  Json j = Json::array();
  for (auto k : b.arms) j.push_back(k + 1);
  return j;
}

inline BAssignment assignment_from_json(const Json& j, std::size_t arms,
                                        const std::string& path = "") {
  if (!j.is_array() || j.empty()) config_error(path, "expected a nonempty array of arms");
  BAssignment b;
  for (std::size_t n = 0; n < j.size(); ++n)
    b.arms.push_back(one_based_at(j[n], path + "/" + std::to_string(n), arms));
  return b;
}

inline Json to_json(const PropertyReport& r) {
  auto list = [](const std::vector<PropertyCheck>& v) {
    Json out = Json::array();
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back({{"i", i + 1},
                     {"holds", v[i].holds},
                     {"applicable", v[i].applicable},
                     {"log_margin", json_number(v[i].margin)}});
    return out;
  };
  return {{"A", list(r.a)},
          {"B", list(r.b)},
          {"C", list(r.c)},
          {"D", list(r.d)},
          {"strictly_decreasing", r.strictly_decreasing}};
}

inline Json to_json(const ConstructedTuple& t) {
  Json j;
  j["kind"] = t.kind == TupleKind::kPure ? "pure" : "mixture";
  j["b"] = to_json(t.b);
  if (t.designated) j["designated"] = *t.designated;
  j["gammas"] = t.gammas;
  if (!t.omegas.empty()) j["omegas"] = t.omegas;
  if (!t.betas.empty()) j["betas"] = t.betas;
  j["tuple"] = to_json(t.tuple)["arms"];
  return j;
}

// ---- policies -------------------------------------------------------------

inline PolicySpec policy_spec_from_json(const Json& j, const std::string& path = "") {
  PolicySpec s;
  if (j.is_string()) {
    s.name = j.get<std::string>();
    return s;
  }
  const auto& name = field(j, "name", path);
  if (!name.is_string()) config_error(path + "/name", "expected a string");
  s.name = name.get<std::string>();
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object()) config_error(path + "/params", "expected an object");
    for (const auto& [k, v] : p.items()) s.params[k] = number_at(v, path + "/params/" + k);
  }
  // Arms are 1-based on the wire.
  if (s.name == "constant_arm" && s.params.count("arm")) {
    if (!(s.params["arm"] >= 1.0)) config_error(path + "/params/arm", "arms are 1-based");
    s.params["arm"] -= 1.0;
  }
  if (j.contains("sequence")) {
    const auto& q = j["sequence"];
    if (!q.is_array()) config_error(path + "/sequence", "expected an array");
    for (std::size_t n = 0; n < q.size(); ++n) {
      const auto v = count_at(q[n], path + "/sequence/" + std::to_string(n));
      if (v < 1) config_error(path + "/sequence/" + std::to_string(n), "arms are 1-based");
      s.sequence.push_back(static_cast<std::size_t>(v - 1));
    }
  }
  return s;
}

inline Json to_json(const PolicySpec& s) {
  Json j;
  j["name"] = s.name;
  Json params = Json::object();
  for (const auto& [k, v] : s.params)
    params[k] = json_number(s.name == "constant_arm" && k == "arm" ? v + 1.0 : v);
  j["params"] = params;
  if (!s.sequence.empty()) {
    Json q = Json::array();
    for (auto k : s.sequence) q.push_back(k + 1);
    j["sequence"] = q;
  }
  return j;
}

inline Json to_json(const PolicyTable& t) {
  Json nodes = Json::array();
  for (auto k : t.node_arms()) nodes.push_back(k + 1);
  return {{"K", t.arms()}, {"alphabet", t.alphabet()}, {"depth", t.depth()}, {"node_arms", nodes}};
}

inline PolicyTable policy_table_from_json(const Json& j, const std::string& path = "") {
  const auto arms = static_cast<std::size_t>(count_at(field(j, "K", path), path + "/K"));
  const auto depth = static_cast<std::size_t>(count_at(field(j, "depth", path), path + "/depth"));
  const auto& alpha = field(j, "alphabet", path);
  const auto& nodes = field(j, "node_arms", path);
  if (!alpha.is_array() || !nodes.is_array()) config_error(path, "alphabet and node_arms must be arrays");
  std::vector<double> alphabet;
  for (std::size_t n = 0; n < alpha.size(); ++n)
    alphabet.push_back(number_at(alpha[n], path + "/alphabet/" + std::to_string(n)));
  std::vector<std::size_t> node_arms;
  for (std::size_t n = 0; n < nodes.size(); ++n)
    node_arms.push_back(one_based_at(nodes[n], path + "/node_arms/" + std::to_string(n), arms));
  try {
    return PolicyTable(arms, std::move(alphabet), depth, std::move(node_arms));
  } catch (const Error& e) {
    config_error(path, e.what());
  }
}

// ---- reports --------------------------------------------------------------

inline Json to_json(const CheckReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = json_number(v);
  Json measured = Json::object();
  for (const auto& [k, v] : r.measured) measured[k] = json_number(v);
  Json j{{"check", r.id}, {"pass", r.pass}, {"params", params}, {"measured", measured},
         {"seed", r.seed}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json optional_time(const std::optional<std::uint64_t>& t) {
  if (t) return *t;
  return "inf";
}

inline Json to_json(const RegretReport& r) {
  Json j{{"T", r.horizon},
         {"T_prime", optional_time(r.t_prime)},
         {"R", json_number(r.ratio)},
         {"oracle_value", r.oracle_value},
         {"mode", to_string(r.mode)},
         {"cap", r.cap},
         {"N", r.trials},
         {"seed", r.seed}};
  if (r.has_interval) {
    j["T_prime_ci_low"] = optional_time(r.ci_low);
    j["T_prime_ci_high"] = optional_time(r.ci_high);
  }
  if (r.curve) {
    j["isotonic_applied"] = r.curve->isotonic_applied;
    j["isotonic_violations"] = r.curve->violations;
  }
  return j;
}

inline Json to_json(const LegacyRatio& r) {
  return {{"policy_value", r.policy_value},
          {"oracle_value", r.oracle_value},
          {"gap", r.gap},
          {"ratio", json_number(r.ratio)}};
}

inline Json to_json(const ScanResult& s) {
  return {{"T", s.horizon},
          {"s_star", s.s_star},
          {"value", s.value},
          {"upper_bound", s.upper_bound},
          {"lower_bound", json_number(s.lower_bound)}};
}

inline Json to_json(const MinCurve& c) {
  return {{"mode", to_string(c.mode)},
          {"N", c.trials},
          {"seed", c.seed},
          {"T_max", c.horizon()},
          {"final_estimate", c.estimate.empty() ? Json(nullptr) : Json(c.estimate.back())},
          {"final_std_error", c.std_error.empty() ? Json(nullptr) : Json(c.std_error.back())},
          {"isotonic_applied", c.isotonic_applied},
          {"isotonic_violations", c.violations},
          {"max_violation_se", c.max_violation_se}};
}

// ---- CSV ------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  // `preamble` becomes a single leading comment line.
  std::string render(const std::string& preamble = "") const {
    std::ostringstream out;
    if (!preamble.empty()) out << "# " << preamble << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t n = 0; n < cells.size(); ++n) out << (n ? "," : "") << cells[n];
      out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }
};

inline CsvTable curve_table(const MinCurve& c) {
  CsvTable t{{"T", "estimate", "std_error", "raw"}, {}};
  for (std::uint64_t h = 1; h <= c.horizon(); ++h)
    t.add({std::to_string(h), format_number(c.at(h)), format_number(c.se_at(h)),
           format_number(c.raw.at(h - 1))});
  return t;
}

inline CsvTable scan_table(const std::vector<ScanResult>& rows) {
  CsvTable t{{"T", "s_star", "value", "upper_bound", "lower_bound"}, {}};
  for (const auto& s : rows)
    t.add({std::to_string(s.horizon), format_number(s.s_star), format_number(s.value),
           format_number(s.upper_bound), format_number(s.lower_bound)});
  return t;
}

inline CsvTable atom_table(const ConstructedTuple& c) {
  CsvTable t{{"arm", "value", "prob", "log_prob"}, {}};
  for (std::size_t k = 0; k < c.tuple.size(); ++k) {
    const auto& d = c.tuple[k];
    for (std::size_t j = 0; j < d.size(); ++j)
      t.add({std::to_string(k + 1), format_number(d.support()[j]), format_number(d.prob(j)),
             format_number(d.log_probs()[j])});
  }
  return t;
}

inline CsvTable check_table(const std::vector<CheckReport>& reports) {
  CsvTable t{{"check", "pass", "quantity", "value"}, {}};
  for (const auto& r : reports)
    for (const auto& [k, v] : r.measured) t.add({r.id, r.pass ? "1" : "0", k, format_number(v)});
  return t;
}

}  // namespace xbandit
