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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "xbandit/distribution.hpp"
#include "xbandit/error.hpp"
#include "xbandit/log_math.hpp"
#include "xbandit/parallel.hpp"
#include "xbandit/policy.hpp"
#include "xbandit/rng.hpp"

namespace xbandit {

// Arm randomness for (trial, t) and policy randomness for (trial, t) come
// from different lanes of the same address.
inline RngStream arm_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t t) {
  return {seed, trial, t, Lane::kArm};
}
inline RngStream policy_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t t) {
  return {seed, trial, t, Lane::kPolicy};
}

struct Trace {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::vector<std::size_t> arms;
  std::vector<double> values;
  std::vector<double> best;  // prefix minimum of values
  friend bool operator==(const Trace&, const Trace&) = default;
};

inline Trace run_trajectory(const Policy& policy, const ArmTuple& tuple, std::uint64_t horizon,
                            std::uint64_t seed, std::uint64_t trial) {
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
  Trace tr{seed, trial, {}, {}, {}};
  tr.arms.reserve(horizon);
  tr.values.reserve(horizon);
  tr.best.reserve(horizon);
  PolicyState state = policy.initial_state(tuple.size());
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::size_t arm = policy.choose(state, t, policy_stream(seed, trial, t));
    require(arm < tuple.size(), ErrorCode::kOutOfRange, "policy chose a nonexistent arm");
    const double x = tuple[arm].sample(arm_stream(seed, trial, t));
    observe(policy, state, arm, x);
    tr.arms.push_back(arm);
    tr.values.push_back(x);
    tr.best.push_back(state.best);
  }
  return tr;
}

// One trial's best-so-far as a step function: (time, new minimum) at every
// strict improvement. The first entry is always at t = 1.
struct StepPath {
  std::vector<std::pair<std::uint64_t, double>> changes;

  double at(std::uint64_t t) const {
    double v = kNoObservation;
    for (const auto& [time, value] : changes) {
      if (time > t) break;
      v = value;
    }
    return v;
  }
};

// Simulates one trial up to `horizon`, stopping early once the smallest value
// any arm can produce has been seen (the prefix minimum is then final).
inline StepPath simulate_path(const Policy& policy, const ArmTuple& tuple, std::uint64_t horizon,
                              std::uint64_t seed, std::uint64_t trial) {
  StepPath path;
  const double floor = tuple.floor_value();
  PolicyState state = policy.initial_state(tuple.size());
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::size_t arm = policy.choose(state, t, policy_stream(seed, trial, t));
    require(arm < tuple.size(), ErrorCode::kOutOfRange, "policy chose a nonexistent arm");
    const double x = tuple[arm].sample(arm_stream(seed, trial, t));
    if (x < state.best) path.changes.emplace_back(t, x);
    observe(policy, state, arm, x);
    if (state.best <= floor) break;
  }
  return path;
}

inline std::vector<StepPath> simulate_paths(const Policy& policy, const ArmTuple& tuple,
                                            std::uint64_t horizon, std::uint64_t trials,
                                            std::uint64_t seed, unsigned workers = 0) {
  std::vector<StepPath> paths(trials);
  parallel_for(trials, workers, [&](std::size_t n) {
    paths[n] = simulate_path(policy, tuple, horizon, seed, n);
  });
  return paths;
}

enum class CurveMode { kExact, kMonteCarlo };

inline std::string to_string(CurveMode m) { return m == CurveMode::kExact ? "exact" : "monte_carlo"; }

/// T -> E[min_{t <= T} x_t] on T = 1..horizon(). Index T - 1 holds horizon T.
struct MinCurve {
  CurveMode mode = CurveMode::kExact;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> estimate;
  std::vector<double> std_error;
  std::vector<double> raw;          // before isotonic correction
  bool isotonic_applied = false;
  std::size_t violations = 0;       // raw increases in T
  double max_violation_se = 0.0;    // largest raw increase in units of SE

  std::uint64_t horizon() const { return estimate.size(); }
  double at(std::uint64_t t) const { return estimate.at(t - 1); }
  double se_at(std::uint64_t t) const { return std_error.at(t - 1); }
};

// Replaces the curve by its running minimum, recording how far the raw
// estimate strayed upward.
inline void apply_isotonic(MinCurve& c) {
  c.raw = c.estimate;
  c.violations = 0;
  c.max_violation_se = 0.0;
  for (std::size_t t = 1; t < c.estimate.size(); ++t) {
    if (c.raw[t] > c.raw[t - 1]) {
      ++c.violations;
      const double se = std::max(c.std_error[t], 1e-300);
      c.max_violation_se = std::max(c.max_violation_se, (c.raw[t] - c.raw[t - 1]) / se);
    }
    c.estimate[t] = std::min(c.estimate[t], c.estimate[t - 1]);
  }
  c.isotonic_applied = true;
}

// Aggregates trials in index order; the reduction order never depends on how
// the paths were produced.
inline MinCurve curve_from_paths(const std::vector<StepPath>& paths, std::uint64_t horizon,
                                 std::uint64_t seed) {
  require(!paths.empty(), ErrorCode::kInvalidArgument, "need at least one trial");
  std::vector<CompensatedSum> dsum(horizon + 1), dsq(horizon + 1);
  for (const auto& p : paths) {
    double prev = 0.0;
    for (const auto& [t, v] : p.changes) {
      dsum[t].add(v - prev);
      dsq[t].add(v * v - prev * prev);
      prev = v;
    }
  }
  const auto n = static_cast<double>(paths.size());
  MinCurve c;
  c.mode = CurveMode::kMonteCarlo;
  c.trials = paths.size();
  c.seed = seed;
  c.estimate.resize(horizon);
  c.std_error.resize(horizon);
  CompensatedSum s, q;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    s.add(dsum[t].value());
    q.add(dsq[t].value());
    const double mean = s.value() / n;
    double var = 0.0;
    if (paths.size() > 1) var = std::max(0.0, (q.value() - s.value() * mean) / (n - 1.0));
    c.estimate[t - 1] = mean;
    c.std_error[t - 1] = std::sqrt(var / n);
  }
  apply_isotonic(c);
  return c;
}

inline MinCurve estimate_min_curve(const Policy& policy, const ArmTuple& tuple,
                                   std::uint64_t horizon, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers = 0) {
  require(trials >= 1, ErrorCode::kInvalidArgument, "need at least one trial");
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
  return curve_from_paths(simulate_paths(policy, tuple, horizon, trials, seed, workers), horizon,
                          seed);
}

// Exact curve for a value-independent arm sequence:
//   E[min_{t <= T}] = int_0^1 prod_t P(X_{k_t} > v) dv,
// integrated piecewise between support points; uniform arms contribute
// (1 - v)^n on every piece.
inline MinCurve schedule_curve(const std::vector<std::size_t>& schedule, const ArmTuple& tuple) {
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& d : tuple.arms) cuts.insert(cuts.end(), d.support().begin(), d.support().end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // tail[k][m] = P(X_k > v) for v in [cuts[m], cuts[m+1]).
  std::vector<std::vector<double>> tail(tuple.size());
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    if (!tuple[k].is_discrete()) continue;
    for (std::size_t m = 0; m + 1 < cuts.size(); ++m)
      tail[k].push_back(tuple[k].strict_survival(cuts[m]));
  }
  std::vector<std::uint64_t> pulls(tuple.size(), 0);
  std::uint64_t uniform_pulls = 0;
  MinCurve c;
  c.mode = CurveMode::kExact;
  for (std::size_t arm : schedule) {
    require(arm < tuple.size(), ErrorCode::kOutOfRange, "schedule names a nonexistent arm");
    ++pulls[arm];
    if (!tuple[arm].is_discrete()) ++uniform_pulls;
    const double np1 = static_cast<double>(uniform_pulls + 1);
    CompensatedSum total;
    for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
      double factor = 1.0;
      for (std::size_t k = 0; k < tuple.size() && factor > 0.0; ++k) {
        if (pulls[k] > 0 && tuple[k].is_discrete())
          factor *= std::pow(tail[k][m], static_cast<double>(pulls[k]));
      }
      if (factor == 0.0) continue;
      const double lo = std::pow(1.0 - cuts[m], np1);
      const double hi = std::pow(1.0 - cuts[m + 1], np1);
      total.add(factor * (lo - hi) / np1);
    }
    c.estimate.push_back(total.value());
  }
  c.std_error.assign(c.estimate.size(), 0.0);
  c.raw = c.estimate;
  return c;
}

inline constexpr double kDefaultLeafBudget = 1e7;

/// Visits every trajectory of a deterministic policy on a discrete tuple.
/// `visit(path, log_prob)` sees each full-length history as (arm, value)
/// pairs together with its log probability.
inline void enumerate_trajectories(
    const Policy& policy, const ArmTuple& tuple, std::uint64_t horizon,
    const std::function<void(const std::vector<std::pair<std::size_t, double>>&, double)>& visit,
    double leaf_budget = kDefaultLeafBudget) {
  require(policy.deterministic(), ErrorCode::kInvalidArgument,
          "trajectory enumeration needs a deterministic policy");
  require(tuple.all_discrete(), ErrorCode::kContinuousArm,
          "trajectory enumeration needs discrete arms");
  std::size_t widest = 1;
  for (const auto& d : tuple.arms) widest = std::max(widest, d.size());
  require(std::pow(static_cast<double>(widest), static_cast<double>(horizon)) <= leaf_budget,
          ErrorCode::kBudgetExceeded, "trajectory tree exceeds the leaf budget");
  std::vector<std::pair<std::size_t, double>> path;
  std::function<void(const PolicyState&, std::uint64_t, double)> rec =
      [&](const PolicyState& state, std::uint64_t t, double log_w) {
        if (t > horizon) {
          visit(path, log_w);
          return;
        }
        const std::size_t arm = policy.choose(state, t, policy_stream(0, 0, t));
        require(arm < tuple.size(), ErrorCode::kOutOfRange, "policy chose a nonexistent arm");
        const auto& d = tuple[arm];
        for (std::size_t j = 0; j < d.size(); ++j) {
          PolicyState next = state;
          observe(policy, next, arm, d.support()[j]);
          path.emplace_back(arm, d.support()[j]);
          rec(next, t + 1, log_w + d.log_probs()[j]);
          path.pop_back();
        }
      };
  rec(policy.initial_state(tuple.size()), 1, 0.0);
}

// Exact curve by closed form when the policy ignores observations, otherwise
// by enumerating the trajectory tree.
inline MinCurve exact_min_curve(const Policy& policy, const ArmTuple& tuple,
                                std::uint64_t horizon, double leaf_budget = kDefaultLeafBudget) {
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
  if (auto sched = policy.schedule(tuple.size(), horizon)) return schedule_curve(*sched, tuple);
  require(policy.deterministic(), ErrorCode::kInvalidArgument,
          "exact curves need a deterministic or value-independent policy");
  require(tuple.all_discrete(), ErrorCode::kContinuousArm,
          "exact curves of adaptive policies need discrete arms");
  std::size_t widest = 1;
  for (const auto& d : tuple.arms) widest = std::max(widest, d.size());
  require(std::pow(static_cast<double>(widest), static_cast<double>(horizon)) <= leaf_budget,
          ErrorCode::kBudgetExceeded, "trajectory tree exceeds the leaf budget");
  std::vector<CompensatedSum> acc(horizon);
  std::function<void(const PolicyState&, std::uint64_t, double)> rec =
      [&](const PolicyState& state, std::uint64_t t, double w) {
        const std::size_t arm = policy.choose(state, t, policy_stream(0, 0, t));
        require(arm < tuple.size(), ErrorCode::kOutOfRange, "policy chose a nonexistent arm");
        const auto& d = tuple[arm];
        for (std::size_t j = 0; j < d.size(); ++j) {
          PolicyState next = state;
          observe(policy, next, arm, d.support()[j]);
          const double wj = w * d.prob(j);
          acc[t - 1].add(wj * next.best);
          if (t < horizon) rec(next, t + 1, wj);
        }
      };
  rec(policy.initial_state(tuple.size()), 1, 1.0);
  MinCurve c;
  c.mode = CurveMode::kExact;
  for (const auto& a : acc) c.estimate.push_back(a.value());
  c.std_error.assign(horizon, 0.0);
  c.raw = c.estimate;
  return c;
}

}  // namespace xbandit
