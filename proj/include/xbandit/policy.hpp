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

#include <algorithm>
#include <any>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "xbandit/distribution.hpp"
#include "xbandit/error.hpp"
#include "xbandit/rng.hpp"

namespace xbandit {

/// What a policy knows after t - 1 steps. Arms are 0-based; time is 1-based.
struct PolicyState {
  std::vector<std::uint64_t> counts;
  std::vector<double> best_per_arm;  // kNoObservation for unplayed arms
  double best = kNoObservation;
  std::uint64_t steps = 0;
  std::any memory;  // owned and interpreted by the policy alone

  explicit PolicyState(std::size_t arms)
      : counts(arms, 0), best_per_arm(arms, kNoObservation) {}

  std::size_t arms() const { return counts.size(); }
};

// Lowest index among the minimizers.
inline std::size_t argmin_lowest(const std::vector<double>& xs) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] < xs[best]) best = k;
  return best;
}

/// Immutable policy definition; all per-run memory lives in PolicyState.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;

  virtual PolicyState initial_state(std::size_t arms) const { return PolicyState(arms); }

  // `rng` is the policy's own stream for time t; it is never shared with the
  // arms.
  virtual std::size_t choose(const PolicyState& state, std::uint64_t t,
                             const RngStream& rng) const = 0;

  virtual void update(PolicyState&, std::size_t, double) const {}

  virtual bool deterministic() const { return true; }

  // The arm sequence for policies whose choices ignore observed values.
  virtual std::optional<std::vector<std::size_t>> schedule(std::size_t, std::uint64_t) const {
    return std::nullopt;
  }
};

using PolicyPtr = std::shared_ptr<const Policy>;

inline void observe(const Policy& policy, PolicyState& state, std::size_t arm, double value) {
  require(arm < state.arms(), ErrorCode::kOutOfRange, "observed arm out of range");
  ++state.counts[arm];
  ++state.steps;
  state.best_per_arm[arm] = std::min(state.best_per_arm[arm], value);
  state.best = std::min(state.best, value);
  policy.update(state, arm, value);
}

class RoundRobin final : public Policy {
 public:
  std::string name() const override { return "round_robin"; }
  std::size_t choose(const PolicyState& s, std::uint64_t t, const RngStream&) const override {
    return static_cast<std::size_t>((t - 1) % s.arms());
  }
  std::optional<std::vector<std::size_t>> schedule(std::size_t arms,
                                                   std::uint64_t horizon) const override {
    std::vector<std::size_t> out(horizon);
    for (std::uint64_t t = 0; t < horizon; ++t) out[t] = static_cast<std::size_t>(t % arms);
    return out;
  }
};

class UniformRandom final : public Policy {
 public:
  std::string name() const override { return "uniform_random"; }
  bool deterministic() const override { return false; }
  std::size_t choose(const PolicyState& s, std::uint64_t, const RngStream& rng) const override {
    return rng.index(s.arms(), 1);
  }
};

// With probability epsilon a uniformly random arm, otherwise the arm that
// produced the best value so far (arm 0 before any observation).
class EpsGreedyMin final : public Policy {
 public:
  explicit EpsGreedyMin(double epsilon) : epsilon_(epsilon) {
    require(epsilon >= 0.0 && epsilon <= 1.0, ErrorCode::kInvalidArgument,
            "epsilon outside [0, 1]");
  }
  std::string name() const override { return "eps_greedy_min"; }
  bool deterministic() const override { return epsilon_ == 0.0; }
  double epsilon() const { return epsilon_; }

  std::size_t choose(const PolicyState& s, std::uint64_t, const RngStream& rng) const override {
    if (rng.uniform(0) < epsilon_) return rng.index(s.arms(), 1);
    return argmin_lowest(s.best_per_arm);
  }

 private:
  double epsilon_;
};

// Running q-quantile of one arm's observations: `lower` holds the
// ceil(q n) smallest values.
struct RunningQuantile {
  std::priority_queue<double> lower;
  std::priority_queue<double, std::vector<double>, std::greater<>> upper;
  std::uint64_t n = 0;

  void insert(double x, double q) {
    ++n;
    if (lower.empty() || x <= lower.top()) {
      lower.push(x);
    } else {
      upper.push(x);
    }
    const auto target = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(n))));
    while (lower.size() > target) {
      upper.push(lower.top());
      lower.pop();
    }
    while (lower.size() < target && !upper.empty()) {
      lower.push(upper.top());
      upper.pop();
    }
  }
  double value() const { return lower.empty() ? kNoObservation : lower.top(); }
};

/// Forced exploration keeps every arm at ceil(sqrt(t)) pulls; otherwise
/// plays the arm whose empirical q-quantile is lowest.
class QuantileThreshold final : public Policy {
 public:
  explicit QuantileThreshold(double quantile) : quantile_(quantile) {
    require(quantile > 0.0 && quantile < 1.0, ErrorCode::kInvalidArgument,
            "quantile outside (0, 1)");
  }
  std::string name() const override { return "quantile_threshold"; }
  double quantile() const { return quantile_; }

  PolicyState initial_state(std::size_t arms) const override {
    PolicyState s(arms);
    s.memory = std::vector<RunningQuantile>(arms);
    return s;
  }

  std::size_t choose(const PolicyState& s, std::uint64_t t, const RngStream&) const override {
    const auto floor_pulls =
        static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(t))));
    for (std::size_t k = 0; k < s.arms(); ++k)
      if (s.counts[k] < floor_pulls) return k;
    const auto& qs = std::any_cast<const std::vector<RunningQuantile>&>(s.memory);
    std::vector<double> score(s.arms());
    for (std::size_t k = 0; k < s.arms(); ++k) score[k] = qs[k].value();
    return argmin_lowest(score);
  }

  void update(PolicyState& s, std::size_t arm, double value) const override {
    std::any_cast<std::vector<RunningQuantile>&>(s.memory)[arm].insert(value, quantile_);
  }

 private:
  double quantile_;
};

// Plays sequence[t - 1], repeating the last entry once the sequence runs out.
class FixedSequence final : public Policy {
 public:
  explicit FixedSequence(std::vector<std::size_t> sequence) : sequence_(std::move(sequence)) {
    require(!sequence_.empty(), ErrorCode::kInvalidArgument, "fixed sequence is empty");
  }
  std::string name() const override { return "fixed_sequence"; }
  const std::vector<std::size_t>& sequence() const { return sequence_; }

  PolicyState initial_state(std::size_t arms) const override {
    for (std::size_t k : sequence_)
      require(k < arms, ErrorCode::kOutOfRange, "fixed sequence names a nonexistent arm");
    return PolicyState(arms);
  }
  std::size_t choose(const PolicyState&, std::uint64_t t, const RngStream&) const override {
    return at(t);
  }
  std::optional<std::vector<std::size_t>> schedule(std::size_t,
                                                   std::uint64_t horizon) const override {
    std::vector<std::size_t> out(horizon);
    for (std::uint64_t t = 1; t <= horizon; ++t) out[t - 1] = at(t);
    return out;
  }

 private:
  std::size_t at(std::uint64_t t) const {
    return sequence_[std::min<std::uint64_t>(t - 1, sequence_.size() - 1)];
  }
  std::vector<std::size_t> sequence_;
};

inline PolicyPtr constant_arm(std::size_t arm) {
  return std::make_shared<FixedSequence>(std::vector<std::size_t>{arm});
}

/// A deterministic policy written out as an arm for every node of the
/// history tree, up to a fixed depth.
///
/// Nodes use heap layout over a (K |V|)-ary tree: the root is node 0 and the
/// child reached by playing arm a and seeing alphabet symbol v is
/// n (K |V|) + a |V| + v + 1. Observed values are mapped to the largest
/// alphabet symbol not exceeding them (the smallest symbol if none does).
class PolicyTable final : public Policy {
 public:
  PolicyTable(std::size_t arms, std::vector<double> alphabet, std::size_t depth,
              std::vector<std::size_t> node_arms)
      : arms_(arms), alphabet_(std::move(alphabet)), depth_(depth), node_arms_(std::move(node_arms)) {
    require(arms_ >= 1 && depth_ >= 1 && !alphabet_.empty(), ErrorCode::kInvalidArgument,
            "policy table needs K, depth and alphabet");
    require(std::is_sorted(alphabet_.begin(), alphabet_.end()), ErrorCode::kInvalidArgument,
            "alphabet must be ascending");
    require(node_arms_.size() == node_count(arms_, alphabet_.size(), depth_),
            ErrorCode::kInvalidArgument, "policy table has the wrong number of nodes");
    for (std::size_t k : node_arms_)
      require(k < arms_, ErrorCode::kOutOfRange, "policy table names a nonexistent arm");
  }

  static std::size_t node_count(std::size_t arms, std::size_t symbols, std::size_t depth) {
    std::size_t total = 0;
    std::size_t level = 1;
    for (std::size_t d = 0; d < depth; ++d) {
      total += level;
      level *= arms * symbols;
    }
    return total;
  }

  std::string name() const override { return "policy_table"; }
  std::size_t arms() const { return arms_; }
  std::size_t depth() const { return depth_; }
  const std::vector<double>& alphabet() const { return alphabet_; }
  const std::vector<std::size_t>& node_arms() const { return node_arms_; }

  std::size_t symbol(double value) const {
    const auto it = std::upper_bound(alphabet_.begin(), alphabet_.end(), value);
    return it == alphabet_.begin() ? 0 : static_cast<std::size_t>(it - alphabet_.begin()) - 1;
  }

  std::size_t child(std::size_t node, std::size_t arm, double value) const {
    return node * arms_ * alphabet_.size() + arm * alphabet_.size() + symbol(value) + 1;
  }

  PolicyState initial_state(std::size_t arms) const override {
    require(arms == arms_, ErrorCode::kInvalidArgument, "policy table built for another K");
    PolicyState s(arms);
    s.memory = std::size_t{0};
    return s;
  }

  std::size_t choose(const PolicyState& s, std::uint64_t t, const RngStream&) const override {
    require(t <= depth_, ErrorCode::kOutOfRange, "history deeper than the policy table");
    return node_arms_[std::any_cast<std::size_t>(s.memory)];
  }

  void update(PolicyState& s, std::size_t arm, double value) const override {
    auto& node = std::any_cast<std::size_t&>(s.memory);
    node = child(node, arm, value);
  }

 private:
  std::size_t arms_;
  std::vector<double> alphabet_;
  std::size_t depth_;
  std::vector<std::size_t> node_arms_;
};

// Every table over the full node set, in lexicographic order of node arms.
inline std::vector<PolicyTable> enumerate_policy_tables(std::size_t arms,
                                                        const std::vector<double>& alphabet,
                                                        std::size_t depth,
                                                        std::size_t limit = 1u << 22) {
  const std::size_t nodes = PolicyTable::node_count(arms, alphabet.size(), depth);
  double total = std::pow(static_cast<double>(arms), static_cast<double>(nodes));
  require(total <= static_cast<double>(limit), ErrorCode::kBudgetExceeded,
          "too many policy tables to enumerate");
  std::vector<PolicyTable> out;
  std::vector<std::size_t> digits(nodes, 0);
  while (true) {
    out.emplace_back(arms, alphabet, depth, digits);
    std::size_t pos = nodes;
    while (pos > 0 && ++digits[pos - 1] == arms) digits[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

inline PolicyTable random_policy_table(std::size_t arms, const std::vector<double>& alphabet,
                                       std::size_t depth, const RngStream& stream) {
  const std::size_t nodes = PolicyTable::node_count(arms, alphabet.size(), depth);
  std::vector<std::size_t> node_arms(nodes);
  for (std::size_t n = 0; n < nodes; ++n) node_arms[n] = stream.at_time(n).index(arms);
  return PolicyTable(arms, alphabet, depth, std::move(node_arms));
}

/// Name plus parameters, as read from configuration. Arm indices are 0-based.
struct PolicySpec {
  std::string name = "round_robin";
  std::map<std::string, double> params;
  std::vector<std::size_t> sequence;

  double param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

inline PolicyPtr baseline(const PolicySpec& spec) {
  if (spec.name == "round_robin") return std::make_shared<RoundRobin>();
  if (spec.name == "uniform_random") return std::make_shared<UniformRandom>();
  if (spec.name == "eps_greedy_min")
    return std::make_shared<EpsGreedyMin>(spec.param("epsilon", 0.1));
  if (spec.name == "quantile_threshold")
    return std::make_shared<QuantileThreshold>(spec.param("quantile", 0.1));
  if (spec.name == "fixed_sequence") return std::make_shared<FixedSequence>(spec.sequence);
  if (spec.name == "constant_arm") {
    const double arm = spec.param("arm", 0.0);
    require(arm >= 0.0 && arm == std::floor(arm), ErrorCode::kInvalidArgument,
            "constant_arm needs a nonnegative integer arm");
    return constant_arm(static_cast<std::size_t>(arm));
  }
  fail(ErrorCode::kUnknownPolicy, "unknown policy '" + spec.name + "'");
}

}  // namespace xbandit
