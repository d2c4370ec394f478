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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "xbandit/xbandit.hpp"

using namespace xbandit;
namespace fs = std::filesystem;

namespace {

Json parse(const std::string& s) { return Json::parse(s); }

ErrorCode config_code(const std::string& text) {
  try {
    cli::config_from_json(parse(text));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;  // sentinel: nothing thrown
}

std::string config_message(const std::string& text) {
  try {
    cli::config_from_json(parse(text));
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const std::string* artifact(const cli::RunResult& r, const std::string& name) {
  for (const auto& a : r.artifacts)
    if (a.name == name) return &a.content;
  return nullptr;
}

std::vector<Json> jsonl(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(Json::parse(line));
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("xbandit_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xbandit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST(ConfigHash, GitBlobId) {
  EXPECT_EQ(cli::git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(cli::git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Config, RejectsUnknownKeysWithPath) {
  EXPECT_EQ(config_code(R"({"command":"simulate","bogus":1})"), ErrorCode::kConfigInvalid);
  EXPECT_NE(config_message(R"({"command":"simulate","bogus":1})").find("/bogus"), std::string::npos);
  EXPECT_NE(config_message(R"({"command":"simulate","T":0})").find("/T"), std::string::npos);
  EXPECT_NE(config_message(R"({"command":"simulate","N":-3})").find("/N"), std::string::npos);
  EXPECT_NE(config_message(R"({"command":"fly"})").find("/command"), std::string::npos);
  EXPECT_NE(config_message(R"({"command":"regret","mode":"fast"})").find("/mode"), std::string::npos);
  EXPECT_NE(config_message(R"({"command":"regret","oracle":"psychic"})").find("/oracle"), std::string::npos);
}

TEST(Config, RoundTrip) {
  const auto c = cli::config_from_json(parse(R"({"command":"regret","seed":5,"T":[3,4],
      "tuple":{"example":1,"p":0.25},"policy":{"name":"eps_greedy_min","params":{"epsilon":0.1}},
      "N":500,"mode":"exact","oracle":"optimal","cap":99,"bootstrap_resamples":12})"));
  const auto again = cli::config_from_json(cli::config_to_json(c));
  EXPECT_EQ(cli::config_to_json(again).dump(), cli::config_to_json(c).dump());
  EXPECT_EQ(again.horizons, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(again.cap, std::optional<std::uint64_t>(99));
  EXPECT_EQ(again.oracle, OracleKind::kOptimal);
  EXPECT_EQ(again.mode, CurveMode::kExact);
}

TEST(Config, OutputDirectoryIsNotHashed) {
  auto c = cli::config_from_json(parse(R"({"command":"best-arm-scan","T":[10]})"));
  const auto a = cli::config_to_json(c).dump();
  c.out_dir = "somewhere/else";
  EXPECT_EQ(cli::config_to_json(c).dump(), a);
}

TEST(Serialize, DistributionRoundTrip) {
  const auto d = make_discrete({{0.1, 0.3}, {0.7, 0.7}});
  const auto back = distribution_from_json(to_json(d));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(std::equal(back.support().begin(), back.support().end(), d.support().begin()));
  EXPECT_EQ(back.prob(0), d.prob(0));
  EXPECT_TRUE(distribution_from_json(to_json(Distribution::uniform01())).is_continuous());
  const auto t = tuple_from_json(to_json(instances::half_vs_quarter()));
  EXPECT_EQ(t.size(), 2u);
}

TEST(Serialize, BadDistributionsReportPath) {
  try {
    tuple_from_json(parse(R"({"arms":[{"kind":"discrete","atoms":[{"value":0.5,"prob":0.4}]}]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
    EXPECT_NE(std::string(e.what()).find("/arms/0"), std::string::npos);
  }
  try {
    tuple_from_json(parse(R"({"arms":[{"kind":"discrete","atoms":[{"value":"x","prob":1}]}]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/arms/0/atoms/0/value"), std::string::npos);
  }
}

TEST(Serialize, AlphaSequences) {
  const auto desk = alpha_sequence_from_json(parse(R"({"K":2,"alphas":"desk"})"));
  EXPECT_EQ(desk.log_alphas, desk_preset(2).log_alphas);
  const auto canon = alpha_sequence_from_json(parse(R"({"K":3,"alphas":"canonical","I_max":3})"));
  EXPECT_EQ(canon.log_alphas, canonical_sequence(3, 3).log_alphas);
  const auto mixed = alpha_sequence_from_json(parse(R"({"K":2,"alphas":[0.05,"canonical:2"]})"));
  EXPECT_EQ(mixed.log_alphas[1], canonical_sequence(2, 2).log_alphas[1]);
  const auto back = alpha_sequence_from_json(to_json(canon));
  EXPECT_EQ(back.log_alphas, canon.log_alphas);
}

TEST(Serialize, PolicyTableRoundTrip) {
  const PolicyTable t(2, {0.1, 1.0}, 2, {0, 1, 0, 1, 1});
  const auto back = policy_table_from_json(to_json(t));
  EXPECT_EQ(back.node_arms(), t.node_arms());
  EXPECT_EQ(back.alphabet(), t.alphabet());
  EXPECT_EQ(to_json(t)["node_arms"][0], 1);  // 1-based on the wire
}

TEST(Serialize, ConstantArmIsOneBased) {
  const auto spec = policy_spec_from_json(parse(R"({"name":"constant_arm","params":{"arm":2}})"));
  EXPECT_EQ(spec.param("arm", -1.0), 1.0);
  EXPECT_EQ(to_json(spec)["params"]["arm"], 2.0);
  EXPECT_THROW(policy_spec_from_json(parse(R"({"name":"constant_arm","params":{"arm":0}})")), Error);
}

TEST(Serialize, Numbers) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(json_number(kInf), Json("inf"));
  EXPECT_EQ(number_at(Json("inf"), ""), kInf);
  EXPECT_EQ(number_at(Json("0.25"), ""), 0.25);
}

TEST(Execute, RegretOnFirstInstance) {
  auto c = cli::config_from_json(parse(
      R"({"command":"regret","T":10,"tuple":{"example":1,"p":0.5},"mode":"exact"})"));
  const auto r = cli::execute(c, 1);
  EXPECT_EQ(r.exit_code, 0);
  const auto* text = artifact(r, "regret.jsonl");
  ASSERT_NE(text, nullptr);
  const auto recs = jsonl(*text);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0]["T_prime"], 11);
  EXPECT_DOUBLE_EQ(recs[0]["R"].get<double>(), 1.1);
  EXPECT_DOUBLE_EQ(recs[0]["legacy"]["ratio"].get<double>(), 2.0);
  ASSERT_NE(artifact(r, "config.json"), nullptr);
  ASSERT_NE(artifact(r, "curve.csv"), nullptr);
  EXPECT_EQ(artifact(r, "curve.csv")->rfind("# ", 0), 0u);
}

TEST(Execute, DeterministicAcrossWorkers) {
  const auto c = cli::config_from_json(parse(R"({"command":"simulate","seed":3,"T":40,"N":2000,
      "tuple":{"example":4},"policy":{"name":"eps_greedy_min","params":{"epsilon":0.2}}})"));
  const auto a = cli::execute(c, 1);
  const auto b = cli::execute(c, 6);
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t n = 0; n < a.artifacts.size(); ++n) {
    EXPECT_EQ(a.artifacts[n].name, b.artifacts[n].name);
    EXPECT_EQ(a.artifacts[n].content, b.artifacts[n].content) << a.artifacts[n].name;
  }
}

TEST(Execute, RecordsCarryProvenance) {
  const auto c = cli::config_from_json(parse(R"({"command":"best-arm-scan","T":[10,100],"seed":4})"));
  const auto r = cli::execute(c, 1);
  const auto recs = jsonl(*artifact(r, "scan.jsonl"));
  ASSERT_EQ(recs.size(), 2u);
  const auto stamped = Json::parse(*artifact(r, "config.json"));
  for (const auto& rec : recs) {
    EXPECT_EQ(rec["seed"], 4);
    EXPECT_EQ(rec["version"], cli::kArtifactVersion);
    EXPECT_EQ(rec["config_hash"], stamped["config_hash"]);
  }
  EXPECT_EQ(stamped["config_hash"], cli::git_blob_hash(cli::config_to_json(c).dump(2) + "\n"));
}

TEST(Execute, PassingVerifyExitsZero) {
  const auto c = cli::config_from_json(parse(
      R"({"command":"verify","check":"lemma5","check_params":{"K":2}})"));
  EXPECT_EQ(cli::execute(c, 1).exit_code, 0);
}

TEST(Run, MalformedConfigWritesNothing) {
  TempDir tmp;
  const auto cfg = tmp.path / "bad.json";
  std::ofstream(cfg) << "{\"command\": \"simulate\", \"T\": [1,";
  const auto out = tmp.path / "out";
  EXPECT_EQ(run_cli({"--config", cfg.string(), "--out-dir", out.string(), "simulate"}), 2);
  EXPECT_FALSE(fs::exists(out));
  std::ofstream(cfg, std::ios::trunc) << R"({"command":"simulate","tuple":{"example":9}})";
  EXPECT_EQ(run_cli({"--config", cfg.string(), "--out-dir", out.string(), "simulate"}), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Run, WritesArtifacts) {
  TempDir tmp;
  const auto out = tmp.path / "scan";
  ASSERT_EQ(run_cli({"--out-dir", out.string(), "best-arm-scan", "--T", "100"}), 0);
  EXPECT_TRUE(fs::exists(out / "scan.csv"));
  EXPECT_TRUE(fs::exists(out / "scan.jsonl"));
  EXPECT_TRUE(fs::exists(out / "config.json"));
  for (const auto& e : fs::directory_iterator(out))
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos);
}

TEST(Run, ConflictingCommandIsConfigError) {
  TempDir tmp;
  const auto cfg = tmp.path / "c.json";
  std::ofstream(cfg) << R"({"command":"regret"})";
  EXPECT_EQ(run_cli({"--config", cfg.string(), "--out-dir", (tmp.path / "o").string(), "simulate"}), 2);
}
