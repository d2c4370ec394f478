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

#include "cli.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "xbandit/xbandit.hpp"

namespace xbandit::cli {
namespace {

const std::set<std::string> kCommands{"simulate", "regret", "verify", "construct", "best-arm-scan"};
const std::vector<std::string> kChecks{"rule59", "beta_law", "lemma5", "lemma6", "lemma7_8",
                                       "lemma10", "lemma11", "corollary9", "theorem1"};

CurveMode mode_from(const std::string& s, const std::string& path) {
  if (s == "exact") return CurveMode::kExact;
  if (s == "monte_carlo" || s == "mc") return CurveMode::kMonteCarlo;
  config_error(path, "mode must be \"exact\" or \"monte_carlo\"");
}

OracleKind oracle_from(const std::string& s, const std::string& path) {
  if (s == "single_armed") return OracleKind::kSingleArmed;
  if (s == "optimal") return OracleKind::kOptimal;
  if (s == "greedy") return OracleKind::kGreedy;
  config_error(path, "oracle must be single_armed, optimal or greedy");
}

const std::string& string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get_ref<const std::string&>();
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) config_error("", "config must be an object");
  static const std::set<std::string> known{
      "command", "seed", "out_dir", "tuple", "policy", "T", "N", "mode", "oracle",
      "cap", "bootstrap_resamples", "check", "check_params", "grid"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) config_error("/" + k, "unknown key");
  ExperimentConfig c;
  if (j.contains("command")) {
    c.command = string_at(j["command"], "/command");
    if (!kCommands.count(c.command)) config_error("/command", "unknown command '" + c.command + "'");
  }
  if (j.contains("seed")) c.seed = count_at(j["seed"], "/seed");
  if (j.contains("out_dir")) c.out_dir = string_at(j["out_dir"], "/out_dir");
  if (j.contains("tuple")) {
    c.tuple = j["tuple"];
    if (!c.tuple.is_object()) config_error("/tuple", "expected an object");
  }
  if (j.contains("policy")) {
    c.policy = j["policy"];
    if (!c.policy.is_string() && !c.policy.is_object())
      config_error("/policy", "expected a name or an object");
  }
  if (j.contains("T")) {
    const auto& t = j["T"];
    c.horizons.clear();
    if (t.is_array()) {
      for (std::size_t n = 0; n < t.size(); ++n)
        c.horizons.push_back(count_at(t[n], "/T/" + std::to_string(n)));
    } else {
      c.horizons.push_back(count_at(t, "/T"));
    }
    if (c.horizons.empty()) config_error("/T", "need at least one horizon");
    for (auto h : c.horizons)
      if (h < 1) config_error("/T", "horizons must be at least 1");
  }
  if (j.contains("N")) {
    c.trials = count_at(j["N"], "/N");
    if (c.trials < 1) config_error("/N", "need at least one trial");
  }
  if (j.contains("mode")) c.mode = mode_from(string_at(j["mode"], "/mode"), "/mode");
  if (j.contains("oracle")) c.oracle = oracle_from(string_at(j["oracle"], "/oracle"), "/oracle");
  if (j.contains("cap") && !j["cap"].is_null()) c.cap = count_at(j["cap"], "/cap");
  if (j.contains("bootstrap_resamples"))
    c.bootstrap_resamples = count_at(j["bootstrap_resamples"], "/bootstrap_resamples");
  if (j.contains("check")) c.check = string_at(j["check"], "/check");
  if (j.contains("check_params")) {
    const auto& p = j["check_params"];
    if (!p.is_object()) config_error("/check_params", "expected an object");
    for (const auto& [k, v] : p.items()) c.check_params[k] = number_at(v, "/check_params/" + k);
  }
  if (j.contains("grid")) c.grid = count_at(j["grid"], "/grid");
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  if (!c.tuple.is_null()) j["tuple"] = c.tuple;
  j["policy"] = c.policy;
  if (c.horizons.size() == 1) {
    j["T"] = c.horizons.front();
  } else {
    j["T"] = c.horizons;
  }
  j["N"] = c.trials;
  j["mode"] = to_string(c.mode);
  j["oracle"] = to_string(c.oracle);
  j["cap"] = c.cap ? Json(*c.cap) : Json(nullptr);
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["check"] = c.check;
  Json params = Json::object();
  for (const auto& [k, v] : c.check_params) params[k] = json_number(v);
  j["check_params"] = params;
  j["grid"] = c.grid;
  return j;
}

std::string git_blob_hash(const std::string& text) {
  const std::string data = "blob " + std::to_string(text.size()) + std::string(1, '\0') + text;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
    fail(ErrorCode::kIoFailure, "SHA-1 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int n = 0; n < len; ++n) {
    std::snprintf(buf, sizeof buf, "%02x", md[n]);
    hex += buf;
  }
  return hex;
}

namespace {

struct Resolved {
  ArmTuple tuple;
  std::optional<AlphaSequence> sequence;
  std::optional<ConstructedTuple> built;
  std::string default_policy;  // used when the config leaves the policy at its default
};

Resolved resolve_tuple(const ExperimentConfig& c) {
  if (c.tuple.is_null()) config_error("/tuple", "missing");
  const auto& t = c.tuple;
  Resolved r;
  if (t.contains("arms")) {
    r.tuple = tuple_from_json(t, "/tuple");
    return r;
  }
  if (t.contains("example")) {
    const auto id = count_at(t["example"], "/tuple/example");
    const double p = t.contains("p") ? number_at(t["p"], "/tuple/p") : 0.5;
    if (id == 1) {
      if (!(p > 0.0 && p < 1.0)) config_error("/tuple/p", "p must lie in (0, 1)");
      r.tuple = instances::bernoulli_vs_one(p);
      r.default_policy = "late_start";
    } else if (id == 2) {
      r.tuple = instances::uniform_vs_one();
      r.default_policy = "late_start";
    } else if (id == 4) {
      r.tuple = instances::half_vs_quarter();
    } else {
      config_error("/tuple/example", "built-in instances are 1, 2 and 4");
    }
    return r;
  }
  if (t.contains("construction")) {
    const auto& k = t["construction"];
    const std::string path = "/tuple/construction";
    auto seq = alpha_sequence_from_json(k, path);
    BAssignment b;
    const bool sample = !k.contains("b") || (k["b"].is_string() && k["b"] == "sample");
    if (sample) {
      b = sample_b(seq.arms, seq.size(), RngStream{c.seed, 0, 0, Lane::kAssignment});
    } else {
      b = assignment_from_json(k["b"], seq.arms, path + "/b");
      if (b.size() != seq.size())
        config_error(path + "/b", "needs one arm per alpha (" + std::to_string(seq.size()) + ")");
    }
    const bool mixture = k.contains("mixture") && k["mixture"].is_boolean() && k["mixture"].get<bool>();
    if (k.contains("designated")) {
      const auto i = count_at(k["designated"], path + "/designated");
      if (i < 1 || i > seq.size()) config_error(path + "/designated", "index outside the sequence");
      if (mixture) {
        r.built = build_mixture(seq, b, i);
      } else {
        r.built = sibling_tuples(seq, b, i).at(b.arms[i - 1]);
      }
    } else {
      if (mixture) config_error(path + "/mixture", "a mixture needs a designated index");
      r.built = build_tuple(seq, b);
    }
    r.tuple = r.built->tuple;
    r.sequence = std::move(seq);
    return r;
  }
  config_error("/tuple", "expected one of arms, example, construction");
}

PolicyPtr resolve_policy(const ExperimentConfig& c, const Resolved& r, std::uint64_t plan_horizon,
                         Json& resolved_json) {
  Json spec = c.policy;
  if (spec.is_string() && spec == "round_robin" && !r.default_policy.empty())
    spec = r.default_policy;
  resolved_json = spec;
  const std::string name = spec.is_string() ? spec.get<std::string>()
                                            : string_at(field(spec, "name", "/policy"), "/policy/name");
  if (name == "late_start") return instances::late_start();
  if (name == "greedy_oracle") return std::make_shared<GreedyOraclePolicy>(r.tuple);
  if (name == "optimal_oracle")
    return std::make_shared<OptimalPlanPolicy>(optimal_oracle(r.tuple, plan_horizon, true).plan);
  if (name == "policy_table")
    return std::make_shared<PolicyTable>(policy_table_from_json(field(spec, "table", "/policy"),
                                                                "/policy/table"));
  const auto ps = policy_spec_from_json(spec, "/policy");
  try {
    return baseline(ps);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownPolicy) config_error("/policy/name", e.what());
    throw;
  }
}

class Recorder {
 public:
  Recorder(const ExperimentConfig& c, std::string hash) : seed_(c.seed), hash_(std::move(hash)) {}

  Json record(const std::string& kind) const {
    return {{"record", kind}, {"seed", seed_}, {"config_hash", hash_}, {"version", kArtifactVersion}};
  }
  std::string preamble() const {
    return "seed=" + std::to_string(seed_) + " config_hash=" + hash_ + " version=" + kArtifactVersion;
  }
  const std::string& hash() const { return hash_; }

 private:
  std::uint64_t seed_;
  std::string hash_;
};

std::string lines(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

Json merge(Json base, const Json& extra) {
  for (const auto& [k, v] : extra.items()) base[k] = v;
  return base;
}

std::uint64_t single_horizon(const ExperimentConfig& c) {
  if (c.horizons.size() != 1) config_error("/T", "this command takes a single horizon");
  return c.horizons.front();
}

// ---- commands -------------------------------------------------------------

void run_simulate(const ExperimentConfig& c, const Recorder& rec, unsigned workers, RunResult& out) {
  const auto r = resolve_tuple(c);
  const auto horizon = single_horizon(c);
  Json policy_json;
  const auto policy = resolve_policy(c, r, horizon, policy_json);
  const MinCurve curve = c.mode == CurveMode::kExact
                             ? exact_min_curve(*policy, r.tuple, horizon)
                             : estimate_min_curve(*policy, r.tuple, horizon, c.trials, c.seed, workers);
  const Trace trace = run_trajectory(*policy, r.tuple, horizon, c.seed, 0);
  CsvTable tt{{"t", "arm", "value", "best"}, {}};
  for (std::size_t t = 0; t < trace.arms.size(); ++t)
    tt.add({std::to_string(t + 1), std::to_string(trace.arms[t] + 1), format_number(trace.values[t]),
            format_number(trace.best[t])});
  auto record = merge(rec.record("simulate"), {{"policy", policy_json}, {"curve", to_json(curve)}});
  out.artifacts.push_back({"curve.csv", curve_table(curve).render(rec.preamble())});
  out.artifacts.push_back({"trace.csv", tt.render(rec.preamble())});
  out.artifacts.push_back({"simulate.jsonl", lines({record})});
  out.summary.push_back("E[min] at T=" + std::to_string(horizon) + ": " +
                        format_number(curve.at(horizon)) + " (se " +
                        format_number(curve.se_at(horizon)) + ", " + to_string(curve.mode) + ")");
}

void run_regret(const ExperimentConfig& c, const Recorder& rec, unsigned workers, RunResult& out) {
  const auto r = resolve_tuple(c);
  const auto horizon = single_horizon(c);
  RegretOptions opts;
  opts.mode = c.mode;
  opts.cap = c.cap;
  opts.trials = c.trials;
  opts.seed = c.seed;
  opts.bootstrap_resamples = c.bootstrap_resamples;
  opts.workers = workers;
  opts.oracle = c.oracle;
  const std::uint64_t cap = c.cap.value_or(4 * r.tuple.size() * horizon);
  Json policy_json;
  const auto policy = resolve_policy(c, r, cap, policy_json);
  const double oracle = oracle_value(r.tuple, horizon, c.oracle, opts);
  const auto rep = extreme_regret(*policy, r.tuple, horizon, oracle, opts);
  const double v = rep.curve->at(std::min(horizon, rep.curve->horizon()));
  const LegacyRatio legacy{v - oracle, v / oracle, v, oracle};
  auto record = merge(rec.record("regret"), to_json(rep));
  record["oracle"] = to_string(c.oracle);
  record["policy"] = policy_json;
  record["legacy"] = to_json(legacy);
  out.artifacts.push_back({"curve.csv", curve_table(*rep.curve).render(rec.preamble())});
  out.artifacts.push_back({"regret.jsonl", lines({record})});
  out.summary.push_back("T=" + std::to_string(horizon) + " T'=" +
                        (rep.t_prime ? std::to_string(*rep.t_prime) : std::string("inf")) +
                        " R=" + format_number(rep.ratio) + " legacy ratio=" +
                        format_number(legacy.ratio));
}

double param(const ExperimentConfig& c, const std::string& key, double fallback) {
  const auto it = c.check_params.find(key);
  return it == c.check_params.end() ? fallback : it->second;
}

std::uint64_t uparam(const ExperimentConfig& c, const std::string& key, std::uint64_t fallback) {
  const double v = param(c, key, static_cast<double>(fallback));
  if (!(v >= 0.0) || v != std::floor(v))
    config_error("/check_params/" + key, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<CheckReport> run_one_check(const std::string& id, const ExperimentConfig& c,
                                       unsigned workers) {
  const std::uint64_t seed = c.seed;
  std::vector<CheckReport> out;
  const auto desk = [&] { return desk_preset(uparam(c, "K", 2)); };
  if (id == "rule59") {
    out.push_back(check_rule59(uparam(c, "N", 100000), seed, workers));
  } else if (id == "beta_law") {
    std::vector<std::uint64_t> ts{1, 10, 59};
    if (c.check_params.count("T")) ts = {uparam(c, "T", 10)};
    for (auto t : ts) out.push_back(check_beta_law(t, uparam(c, "N", 100000), seed, workers));
  } else if (id == "lemma5") {
    const std::uint64_t len = uparam(c, "I_max", 4);
    if (param(c, "desk", 0) != 0) {
      out.push_back(check_lemma5(desk()));
    } else if (c.check_params.count("K")) {
      out.push_back(check_lemma5(canonical_sequence(uparam(c, "K", 2), len)));
    } else {
      for (std::size_t k : {2, 3, 5}) out.push_back(check_lemma5(canonical_sequence(k, len)));
    }
  } else if (id == "lemma6") {
    const auto seq = desk();
    if (c.check_params.count("i")) {
      out.push_back(check_lemma6_suite(seq, uparam(c, "i", 2)));
    } else {
      for (std::size_t i = 1; i <= seq.size(); ++i) out.push_back(check_lemma6_suite(seq, i));
    }
  } else if (id == "lemma7_8") {
    out.push_back(check_lemma7_8_suite(desk(), uparam(c, "i", 2), uparam(c, "depth", 2),
                                       uparam(c, "random", 100), seed));
  } else if (id == "lemma10") {
    out.push_back(check_lemma10_suite(uparam(c, "cases", 1000), seed));
  } else if (id == "lemma11") {
    const std::size_t grid = uparam(c, "grid", 10000);
    if (c.check_params.count("i")) {
      out.push_back(check_lemma11(uparam(c, "i", 1), grid));
    } else {
      out.push_back(check_lemma11_suite(uparam(c, "max_i", 100), grid));
    }
  } else if (id == "corollary9" || id == "theorem1") {
    Resolved none;
    Json policy_json;
    const auto policy = resolve_policy(c, none, 1, policy_json);
    AssignmentStudy study{uparam(c, "N_b", 200), uparam(c, "N_mc", 400), seed, workers};
    const auto seq = desk();
    const std::size_t i = uparam(c, "i", 2);
    auto rep = id == "corollary9" ? check_corollary9(seq, i, *policy, study)
                                  : demonstrate_theorem1(seq, i, *policy, {study, 0});
    rep.note = "policy " + policy->name();
    out.push_back(std::move(rep));
  } else {
    config_error("/check", "unknown check '" + id + "'");
  }
  return out;
}

void run_verify(const ExperimentConfig& c, const Recorder& rec, unsigned workers, RunResult& out) {
  std::vector<CheckReport> reports;
  if (c.check == "all") {
    for (const auto& id : kChecks) {
      auto some = run_one_check(id, c, workers);
      reports.insert(reports.end(), some.begin(), some.end());
    }
  } else {
    reports = run_one_check(c.check, c, workers);
  }
  std::vector<Json> records;
  bool all_pass = true;
  for (const auto& r : reports) {
    records.push_back(merge(rec.record("check"), to_json(r)));
    all_pass = all_pass && r.pass;
    out.summary.push_back(std::string(r.pass ? "PASS " : "FAIL ") + r.id);
  }
  auto total = rec.record("verify_summary");
  total["check"] = c.check;
  total["reports"] = reports.size();
  total["pass"] = all_pass;
  records.push_back(total);
  out.artifacts.push_back({"verify.jsonl", lines(records)});
  out.artifacts.push_back({"verify.csv", check_table(reports).render(rec.preamble())});
  out.exit_code = all_pass ? 0 : 1;
}

void run_construct(const ExperimentConfig& c, const Recorder& rec, unsigned, RunResult& out) {
  const auto r = resolve_tuple(c);
  if (!r.built) config_error("/tuple", "construct needs a construction tuple");
  const auto& seq = *r.sequence;
  Json horizons = Json::array();
  for (std::size_t i = 1; i <= seq.size(); ++i) {
    Json h{{"i", i}, {"alpha", std::exp(seq.log_alpha(i))}, {"log_alpha", format_number(seq.log_alpha(i))}};
    try {
      h["T_i"] = horizon_T(seq.log_alpha(i));
    } catch (const HorizonOverflow& e) {
      h["T_i"] = "overflow";
      h["log_T_i"] = e.log_horizon();
    }
    h["c_i"] = horizon_correction(i);
    try {
      h["T_i_prime"] = horizon_Tprime(seq.log_alpha(i), i, seq.arms).value;
    } catch (const HorizonOverflow& e) {
      h["T_i_prime"] = "overflow";
      h["log_T_i_prime"] = e.log_horizon();
    }
    horizons.push_back(h);
  }
  auto record = rec.record("construct");
  record["sequence"] = to_json(seq);
  record["properties"] = to_json(validate_alpha_sequence(seq));
  record["horizons"] = horizons;
  record["constructed"] = to_json(*r.built);
  out.artifacts.push_back({"atoms.csv", atom_table(*r.built).render(rec.preamble())});
  out.artifacts.push_back({"construct.jsonl", lines({record})});
  out.summary.push_back("K=" + std::to_string(seq.arms) + " I=" + std::to_string(seq.size()) +
                        " b=" + to_json(r.built->b).dump());
}

void run_scan(const ExperimentConfig& c, const Recorder& rec, unsigned, RunResult& out) {
  std::vector<ScanResult> rows;
  std::vector<Json> records;
  for (auto t : c.horizons) {
    rows.push_back(best_arm_scan(t, c.grid));
    records.push_back(merge(rec.record("best_arm_scan"), to_json(rows.back())));
    out.summary.push_back("T=" + std::to_string(t) + " s*=" + format_number(rows.back().s_star));
  }
  out.artifacts.push_back({"scan.csv", scan_table(rows).render(rec.preamble())});
  out.artifacts.push_back({"scan.jsonl", lines(records)});
}

}  // namespace

RunResult execute(const ExperimentConfig& config, unsigned workers) {
  if (!kCommands.count(config.command)) config_error("/command", "missing or unknown command");
  const Json resolved = config_to_json(config);
  const std::string text = resolved.dump(2) + "\n";
  const Recorder rec(config, git_blob_hash(text));
  RunResult out;
  if (config.command == "simulate") run_simulate(config, rec, workers, out);
  if (config.command == "regret") run_regret(config, rec, workers, out);
  if (config.command == "verify") run_verify(config, rec, workers, out);
  if (config.command == "construct") run_construct(config, rec, workers, out);
  if (config.command == "best-arm-scan") run_scan(config, rec, workers, out);
  Json stamped{{"config_hash", rec.hash()}, {"version", kArtifactVersion}, {"config", resolved}};
  out.artifacts.push_back({"config.json", stamped.dump(2) + "\n"});
  return out;
}

void emit_results(const std::string& out_dir, const std::vector<Artifact>& artifacts) {
  require(!artifacts.empty(), ErrorCode::kInvalidArgument, "nothing to write");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + out_dir + ": " + ec.message());
  for (const auto& a : artifacts) {
    const fs::path final_path = fs::path(out_dir) / a.name;
    const fs::path tmp = fs::path(out_dir) / ("." + a.name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << a.content;
      if (!f) fail(ErrorCode::kIoFailure, "cannot write " + tmp.string());
    }
    fs::rename(tmp, final_path, ec);
    if (ec) fail(ErrorCode::kIoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Extreme-bandit simulation and verification"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "top-level seed");
  app.add_option("--out-dir", out_dir, "output directory");

  std::vector<std::uint64_t> horizons;
  std::optional<std::uint64_t> trials, cap, example, bootstrap, grid;
  std::optional<double> p;
  std::optional<std::string> policy, oracle, check;
  std::vector<std::string> kv;
  bool exact = false;
  bool mc = false;

  auto common = [&](CLI::App* s, bool curves) {
    s->fallthrough();
    s->add_option("--T", horizons, "horizon(s)");
    if (!curves) return;
    s->add_option("--N,--trials", trials, "Monte Carlo trials");
    s->add_option("--example", example, "built-in instance (1, 2 or 4)");
    s->add_option("--p", p, "Bernoulli parameter of instance 1");
    s->add_option("--policy", policy, "policy name");
    s->add_flag("--exact", exact, "exact curves");
    s->add_flag("--mc", mc, "Monte Carlo curves");
  };
  auto* sim = app.add_subcommand("simulate", "best-so-far curve of a policy");
  common(sim, true);
  auto* reg = app.add_subcommand("regret", "extreme regret against an oracle");
  common(reg, true);
  reg->add_option("--cap", cap, "largest T' searched (default 4 K T)");
  reg->add_option("--oracle", oracle, "single_armed | optimal | greedy");
  reg->add_option("--bootstrap", bootstrap, "bootstrap resamples (Monte Carlo mode)");
  auto* ver = app.add_subcommand("verify", "run numerical checks");
  ver->fallthrough();
  ver->add_option("check", check, "check id or 'all'");
  ver->add_option("--param", kv, "key=value check parameter");
  ver->add_option("--policy", policy, "policy for corollary9 / theorem1");
  auto* con = app.add_subcommand("construct", "dump a constructed tuple");
  con->fallthrough();
  std::optional<std::uint64_t> con_k, con_imax, con_designated;
  std::optional<std::string> con_alphas, con_b;
  bool con_mixture = false;
  con->add_option("--K", con_k, "number of arms");
  con->add_option("--alphas", con_alphas, "desk | canonical | comma-separated values");
  con->add_option("--I-max", con_imax, "length of the canonical sequence");
  con->add_option("--b", con_b, "comma-separated 1-based arms, or 'sample'");
  con->add_option("--designated", con_designated, "index whose atom moves between siblings");
  con->add_flag("--mixture", con_mixture, "arm-wise average of the siblings");
  auto* scan = app.add_subcommand("best-arm-scan", "optimal s for the point-mass family");
  common(scan, false);
  scan->add_option("--grid", grid, "grid points before refinement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    Json j = Json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      try {
        j = Json::parse(f);
      } catch (const Json::parse_error& e) {
        config_error("", std::string("malformed JSON: ") + e.what());
      }
    }
    ExperimentConfig c = config_from_json(j);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (!c.command.empty() && c.command != sub)
      config_error("/command", "config says '" + c.command + "' but '" + sub + "' was requested");
    c.command = sub;
    if (seed) c.seed = *seed;
    if (out_dir) c.out_dir = *out_dir;
    if (!horizons.empty()) c.horizons = horizons;
    if (trials) c.trials = *trials;
    if (cap) c.cap = *cap;
    if (bootstrap) c.bootstrap_resamples = *bootstrap;
    if (grid) c.grid = *grid;
    if (exact) c.mode = CurveMode::kExact;
    if (mc) c.mode = CurveMode::kMonteCarlo;
    if (oracle) c.oracle = oracle_from(*oracle, "--oracle");
    if (policy) c.policy = *policy;
    if (example) {
      c.tuple = Json{{"example", *example}};
      if (p) c.tuple["p"] = *p;
    } else if (p) {
      if (!c.tuple.contains("example")) config_error("--p", "only meaningful with an example");
      c.tuple["p"] = *p;
    }
    if (check) c.check = *check;
    for (const auto& item : kv) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) config_error("--param", "expected key=value, got '" + item + "'");
      c.check_params[item.substr(0, eq)] = number_at(Json(item.substr(eq + 1)), "--param");
    }
    if (sub == "construct" && (con_k || con_alphas || con_b || con_imax || con_designated || con_mixture)) {
      Json k = c.tuple.contains("construction") ? c.tuple["construction"] : Json::object();
      if (con_k) k["K"] = *con_k;
      if (!k.contains("K")) k["K"] = 2;
      if (con_alphas) {
        if (*con_alphas == "desk" || *con_alphas == "canonical") {
          k["alphas"] = *con_alphas;
        } else {
          Json a = Json::array();
          std::stringstream ss(*con_alphas);
          for (std::string tok; std::getline(ss, tok, ',');) a.push_back(tok);
          k["alphas"] = a;
        }
      }
      if (!k.contains("alphas") && !k.contains("log_alphas")) k["alphas"] = "desk";
      if (con_imax) k["I_max"] = *con_imax;
      if (con_b) {
        if (*con_b == "sample") {
          k["b"] = "sample";
        } else {
          Json b = Json::array();
          std::stringstream ss(*con_b);
          for (std::string tok; std::getline(ss, tok, ',');) {
            try {
              b.push_back(std::stoull(tok));
            } catch (const std::exception&) {
              config_error("--b", "expected comma-separated arm numbers");
            }
          }
          k["b"] = b;
        }
      }
      if (con_designated) k["designated"] = *con_designated;
      if (con_mixture) k["mixture"] = true;
      c.tuple = Json{{"construction", k}};
    }
    if (sub == "construct" && c.tuple.is_null())
      c.tuple = Json{{"construction", {{"K", 2}, {"alphas", "desk"}}}};
    // Round-trip so flag values pass the same validation as file values.
    const std::string destination = c.out_dir;
    c = config_from_json(config_to_json(c));
    c.out_dir = destination;

    const RunResult result = execute(c, worker_count());
    emit_results(c.out_dir, result.artifacts);
    for (const auto& line : result.summary) std::cout << line << "\n";
    std::cout << "wrote " << result.artifacts.size() << " files to " << c.out_dir << "\n";
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigInvalid ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace xbandit::cli
