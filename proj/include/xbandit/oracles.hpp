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

// Oracles that know the arm distributions: the best single arm for a given
// horizon, the optimal adaptive policy, and one-step greedy improvement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xbandit/distribution.hpp"
#include "xbandit/engine.hpp"
#include "xbandit/error.hpp"
#include "xbandit/log_math.hpp"
#include "xbandit/policy.hpp"

namespace xbandit {

enum class OracleKind { kSingleArmed, kOptimal, kGreedy };

inline std::string to_string(OracleKind k) {
  switch (k) {
    case OracleKind::kSingleArmed: return "single_armed";
    case OracleKind::kOptimal: return "optimal";
    case OracleKind::kGreedy: return "greedy";
  }
  return "unknown";
}

struct SingleArmedResult {
  std::size_t arm;
  double value;
};

inline SingleArmedResult single_armed_oracle(const ArmTuple& tuple, std::uint64_t horizon) {
  require(tuple.size() >= 1, ErrorCode::kInvalidArgument, "empty tuple");
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
  SingleArmedResult best{0, tuple[0].expected_min(horizon)};
  for (std::size_t k = 1; k < tuple.size(); ++k) {
    const double v = tuple[k].expected_min(horizon);
    if (v < best.value) best = {k, v};
  }
  return best;
}

inline std::size_t greedy_oracle_step(const ArmTuple& tuple, double best_so_far) {
  std::size_t arm = 0;
  double lowest = tuple[0].expected_min_capped(best_so_far);
  for (std::size_t k = 1; k < tuple.size(); ++k) {
    const double v = tuple[k].expected_min_capped(best_so_far);
    if (v < lowest) {
      lowest = v;
      arm = k;
    }
  }
  return arm;
}

inline constexpr std::size_t kMaxJointSupport = 64;
inline constexpr std::uint64_t kMaxDpHorizon = 100000;

/// Best-so-far state space shared by the exact optimal and greedy programs.
/// State s < size() means best-so-far == support[s]; state size() is the
/// no-observation sentinel.
class BestSoFarSpace {
 public:
  explicit BestSoFarSpace(const ArmTuple& tuple, std::uint64_t horizon) {
    require(tuple.all_discrete(), ErrorCode::kContinuousArm,
            "exact oracle programs need discrete arms");
    require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
    support_ = tuple.joint_support();
    require(support_.size() <= kMaxJointSupport && horizon <= kMaxDpHorizon,
            ErrorCode::kBudgetExceeded, "joint support or horizon exceeds the DP budget");
    arms_.resize(tuple.size());
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      for (std::size_t j = 0; j < tuple[k].size(); ++j) {
        const auto it = std::lower_bound(support_.begin(), support_.end(), tuple[k].support()[j]);
        arms_[k].push_back({static_cast<std::size_t>(it - support_.begin()), tuple[k].prob(j)});
      }
    }
  }

  std::size_t size() const { return support_.size(); }
  std::size_t sentinel() const { return support_.size(); }
  double value(std::size_t s) const { return s == sentinel() ? kNoObservation : support_[s]; }

  std::size_t state_of(double best) const {
    if (best == kNoObservation) return sentinel();
    const auto it = std::lower_bound(support_.begin(), support_.end(), best);
    return static_cast<std::size_t>(it - support_.begin());
  }

  // sum_j p_kj W[min(s, idx_kj)]
  double expect(std::size_t arm, std::size_t s, const std::vector<double>& w) const {
    CompensatedSum acc;
    for (const auto& [idx, p] : arms_[arm]) acc.add(p * w[std::min(s, idx)]);
    return acc.value();
  }

  std::size_t arms() const { return arms_.size(); }

  // W(y, 0) = y. The sentinel is never terminal for horizons >= 1.
  std::vector<double> terminal() const {
    std::vector<double> w(size() + 1, 1.0);
    for (std::size_t s = 0; s < size(); ++s) w[s] = support_[s];
    return w;
  }

 private:
  std::vector<double> support_;
  std::vector<std::vector<std::pair<std::size_t, double>>> arms_;
};

/// Arm to play for every (steps remaining, best-so-far state).
struct OptimalPlan {
  std::uint64_t horizon = 0;
  std::size_t states = 0;  // including the sentinel
  std::vector<std::uint16_t> arm;  // arm[(r - 1) * states + s]
  BestSoFarSpace space;

  std::size_t choose(std::uint64_t remaining, double best) const {
    return arm[(remaining - 1) * states + space.state_of(best)];
  }
};

struct OptimalResult {
  double value;
  std::shared_ptr<const OptimalPlan> plan;  // null unless requested
};

// W(y, r) = min_k E[W(min(y, X_k), r - 1)], returning W(sentinel, T).
// Ties go to the lowest arm index.
inline OptimalResult optimal_oracle(const ArmTuple& tuple, std::uint64_t horizon,
                                    bool keep_plan = false) {
  BestSoFarSpace space(tuple, horizon);
  const std::size_t states = space.size() + 1;
  std::vector<double> w = space.terminal();
  std::vector<double> next(states);
  std::vector<std::uint16_t> arms;
  if (keep_plan) arms.resize(horizon * states);
  for (std::uint64_t r = 1; r <= horizon; ++r) {
    for (std::size_t s = 0; s < states; ++s) {
      std::size_t best_arm = 0;
      double best = space.expect(0, s, w);
      for (std::size_t k = 1; k < space.arms(); ++k) {
        const double v = space.expect(k, s, w);
        if (v < best) {
          best = v;
          best_arm = k;
        }
      }
      next[s] = best;
      if (keep_plan) arms[(r - 1) * states + s] = static_cast<std::uint16_t>(best_arm);
    }
    std::swap(w, next);
  }
  OptimalResult out{w[space.sentinel()], nullptr};
  if (keep_plan)
    out.plan = std::make_shared<OptimalPlan>(OptimalPlan{horizon, states, std::move(arms), space});
  return out;
}

inline double optimal_oracle_value(const ArmTuple& tuple, std::uint64_t horizon) {
  return optimal_oracle(tuple, horizon).value;
}

// Plays an optimal plan; only meaningful up to the plan's horizon.
class OptimalPlanPolicy final : public Policy {
 public:
  explicit OptimalPlanPolicy(std::shared_ptr<const OptimalPlan> plan) : plan_(std::move(plan)) {}
  std::string name() const override { return "optimal_oracle"; }
  std::size_t choose(const PolicyState& s, std::uint64_t t, const RngStream&) const override {
    require(t <= plan_->horizon, ErrorCode::kOutOfRange, "past the optimal plan's horizon");
    return plan_->choose(plan_->horizon - t + 1, s.best);
  }

 private:
  std::shared_ptr<const OptimalPlan> plan_;
};

// Greedy oracle as a policy; works for continuous arms too.
class GreedyOraclePolicy final : public Policy {
 public:
  explicit GreedyOraclePolicy(ArmTuple tuple) : tuple_(std::move(tuple)) {}
  std::string name() const override { return "greedy_oracle"; }
  std::size_t choose(const PolicyState& s, std::uint64_t, const RngStream&) const override {
    return greedy_oracle_step(tuple_, s.best);
  }

 private:
  ArmTuple tuple_;
};

struct GreedyOptions {
  CurveMode mode = CurveMode::kExact;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct GreedyResult {
  double value;
  double std_error;  // zero in exact mode
};

inline GreedyResult greedy_oracle_value(const ArmTuple& tuple, std::uint64_t horizon,
                                        const GreedyOptions& opts = {}) {
  if (opts.mode == CurveMode::kMonteCarlo) {
    GreedyOraclePolicy policy(tuple);
    const auto c = estimate_min_curve(policy, tuple, horizon, opts.trials, opts.seed, opts.workers);
    return {c.raw.back(), c.std_error.back()};
  }
  BestSoFarSpace space(tuple, horizon);
  const std::size_t states = space.size() + 1;
  std::vector<std::size_t> greedy(states);
  for (std::size_t s = 0; s < states; ++s) greedy[s] = greedy_oracle_step(tuple, space.value(s));
  std::vector<double> w = space.terminal();
  std::vector<double> next(states);
  for (std::uint64_t r = 1; r <= horizon; ++r) {
    for (std::size_t s = 0; s < states; ++s) next[s] = space.expect(greedy[s], s, w);
    std::swap(w, next);
  }
  return {w[space.sentinel()], 0.0};
}

// Arm with P(x = s) = s and P(x = 1) = 1 - s.
inline Distribution scan_arm(double s) {
  require(s > 0.0 && s < 1.0, ErrorCode::kOutOfRange, "s must lie in (0, 1)");
  return make_discrete({{s, s}, {1.0, 1.0 - s}});
}

// E[min of T draws from scan_arm(s)] = s + (1 - s)^(T + 1).
inline double scan_objective(double s, std::uint64_t horizon) {
  return s + std::exp(static_cast<double>(horizon + 1) * std::log1p(-s));
}

struct ScanResult {
  std::uint64_t horizon;
  double s_star;
  double value;
  double upper_bound;  // 2 log T / T
  double lower_bound;  // (log T - log 2 - log log T) / (2 (T + 1))
};

// Grid search over (0, 1) followed by golden-section refinement of the
// bracketing cell. The objective is convex in s.
inline ScanResult best_arm_scan(std::uint64_t horizon, std::size_t grid = 10000,
                                double tolerance = 1e-9) {
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
  require(grid >= 3, ErrorCode::kInvalidArgument, "grid needs at least three points");
  const double step = 1.0 / static_cast<double>(grid + 1);
  std::size_t best_j = 1;
  double best_v = scan_objective(step, horizon);
  for (std::size_t j = 2; j <= grid; ++j) {
    const double v = scan_objective(static_cast<double>(j) * step, horizon);
    if (v < best_v) {
      best_v = v;
      best_j = j;
    }
  }
  double lo = static_cast<double>(best_j - 1) * step;
  double hi = static_cast<double>(best_j + 1) * step;
  lo = std::max(lo, 1e-300);
  hi = std::min(hi, 1.0 - 1e-16);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = scan_objective(x1, horizon);
  double f2 = scan_objective(x2, horizon);
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = scan_objective(x1, horizon);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = scan_objective(x2, horizon);
    }
  }
  const double s = 0.5 * (lo + hi);
  const auto t = static_cast<double>(horizon);
  const double log_t = std::log(t);
  const double lower =
      horizon >= 2 ? (log_t - std::log(2.0) - std::log(log_t)) / (2.0 * (t + 1.0)) : kNegInf;
  return {horizon, s, scan_objective(s, horizon), 2.0 * log_t / t, lower};
}

}  // namespace xbandit
