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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xbandit/serialize.hpp"

namespace xbandit::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Everything a run depends on. Worker count is deliberately absent: it comes
/// from the environment and never changes results.
struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  Json tuple;                          // {"arms"} | {"example"} | {"construction"}
  Json policy = "round_robin";         // name or {"name", "params", "sequence", "table"}
  std::vector<std::uint64_t> horizons{10};
  std::uint64_t trials = 10000;
  CurveMode mode = CurveMode::kMonteCarlo;
  OracleKind oracle = OracleKind::kSingleArmed;
  std::optional<std::uint64_t> cap;
  std::size_t bootstrap_resamples = 1000;
  std::string check = "all";
  std::map<std::string, double> check_params;
  std::size_t grid = 10000;
};

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);

// Git blob id of `text`: SHA-1 over "blob <size>\0" + text.
std::string git_blob_hash(const std::string& text);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  int exit_code = 0;
  std::vector<Artifact> artifacts;
  std::vector<std::string> summary;  // human-readable lines for stdout
};

// Runs a command entirely in memory; nothing touches the filesystem.
RunResult execute(const ExperimentConfig& config, unsigned workers = 0);

// Writes every artifact under out_dir, each through a temporary file.
void emit_results(const std::string& out_dir, const std::vector<Artifact>& artifacts);

int run(int argc, char** argv);

}  // namespace xbandit::cli
