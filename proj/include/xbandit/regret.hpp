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
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "xbandit/distribution.hpp"
#include "xbandit/engine.hpp"
#include "xbandit/error.hpp"
#include "xbandit/oracles.hpp"
#include "xbandit/policy.hpp"
#include "xbandit/rng.hpp"

namespace xbandit {

struct RegretOptions {
  CurveMode mode = CurveMode::kExact;
  std::optional<std::uint64_t> cap;  // defaults to 4 K T
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::size_t bootstrap_resamples = 1000;
  // Relative slack on the exact-mode comparison against the oracle value, so
  // two routes to the same number do not disagree by an ulp.
  double exact_slack = 1e-12;
  unsigned workers = 0;
  OracleKind oracle = OracleKind::kSingleArmed;  // used by legacy_ratio
};

/// Extreme regret R_T = T' / T, where T' is the first horizon at which the
/// policy's expected best-so-far reaches the oracle's value at T. A missing
/// T' (nothing up to the cap qualifies) is reported as infinity.
struct RegretReport {
  std::uint64_t horizon = 0;                 // T
  std::optional<std::uint64_t> t_prime;      // nullopt == infinity
  double ratio = kInf;
  double oracle_value = 0.0;
  CurveMode mode = CurveMode::kExact;
  std::uint64_t cap = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  // Bootstrap 95% percentile interval on T' (Monte Carlo only); nullopt ends
  // mean infinity.
  bool has_interval = false;
  std::optional<std::uint64_t> ci_low;
  std::optional<std::uint64_t> ci_high;
  std::shared_ptr<const MinCurve> curve;
};

inline std::optional<std::uint64_t> first_at_or_below(const MinCurve& c, double threshold) {
  for (std::uint64_t t = 1; t <= c.horizon(); ++t)
    if (c.at(t) <= threshold) return t;
  return std::nullopt;
}

namespace detail {

struct PathEvent {
  std::uint64_t time;
  std::size_t trial;
  double delta;
};

// All improvements of all trials, ordered by time then trial.
inline std::vector<PathEvent> path_events(const std::vector<StepPath>& paths) {
  std::vector<PathEvent> ev;
  for (std::size_t n = 0; n < paths.size(); ++n) {
    double prev = 0.0;
    for (const auto& [t, v] : paths[n].changes) {
      ev.push_back({t, n, v - prev});
      prev = v;
    }
  }
  std::sort(ev.begin(), ev.end(), [](const PathEvent& a, const PathEvent& b) {
    return std::tie(a.time, a.trial) < std::tie(b.time, b.trial);
  });
  return ev;
}

inline std::optional<std::uint64_t> weighted_crossing(const std::vector<PathEvent>& ev,
                                                      const std::vector<double>& weight,
                                                      double total_weight, double threshold,
                                                      std::uint64_t cap) {
  CompensatedSum s;
  std::size_t e = 0;
  while (e < ev.size() && ev[e].time <= cap) {
    const std::uint64_t t = ev[e].time;
    for (; e < ev.size() && ev[e].time == t; ++e) s.add(weight[ev[e].trial] * ev[e].delta);
    if (s.value() / total_weight <= threshold) return t;
  }
  return std::nullopt;
}

}  // namespace detail

struct BootstrapInterval {
  std::optional<std::uint64_t> low;
  std::optional<std::uint64_t> high;
};

// Percentile interval for T' from trial-level resamples. Resample r draws
// its trial indices from the bootstrap lane at trial r.
inline BootstrapInterval bootstrap_t_prime(const std::vector<StepPath>& paths, double threshold,
                                           std::uint64_t cap, std::size_t resamples,
                                           std::uint64_t seed) {
  const auto events = detail::path_events(paths);
  const std::size_t n = paths.size();
  std::vector<std::uint64_t> found;  // cap + 1 stands for infinity
  std::vector<double> weight(n);
  for (std::size_t r = 0; r < resamples; ++r) {
    std::fill(weight.begin(), weight.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const RngStream s{seed, r, j, Lane::kBootstrap};
      weight[s.index(n)] += 1.0;
    }
    const auto t = detail::weighted_crossing(events, weight, static_cast<double>(n), threshold, cap);
    found.push_back(t ? *t : cap + 1);
  }
  std::sort(found.begin(), found.end());
  auto pick = [&](double q) -> std::optional<std::uint64_t> {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(found.size() - 1)));
    const std::uint64_t v = found[idx];
    if (v > cap) return std::nullopt;
    return v;
  };
  return {pick(0.025), pick(0.975)};
}

inline RegretReport extreme_regret(const Policy& policy, const ArmTuple& tuple,
                                   std::uint64_t horizon, double oracle_value,
                                   const RegretOptions& opts = {}) {
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be at least 1");
  RegretReport rep;
  rep.horizon = horizon;
  rep.oracle_value = oracle_value;
  rep.mode = opts.mode;
  rep.cap = opts.cap.value_or(4 * tuple.size() * horizon);
  rep.seed = opts.seed;
  if (opts.mode == CurveMode::kExact) {
    auto curve = std::make_shared<MinCurve>(exact_min_curve(policy, tuple, rep.cap));
    rep.t_prime =
        first_at_or_below(*curve, oracle_value + opts.exact_slack * std::abs(oracle_value));
    rep.curve = std::move(curve);
  } else {
    const auto paths =
        simulate_paths(policy, tuple, rep.cap, opts.trials, opts.seed, opts.workers);
    auto curve = std::make_shared<MinCurve>(curve_from_paths(paths, rep.cap, opts.seed));
    rep.t_prime = first_at_or_below(*curve, oracle_value);
    rep.trials = opts.trials;
    if (opts.bootstrap_resamples > 0) {
      const auto ci = bootstrap_t_prime(paths, oracle_value, rep.cap, opts.bootstrap_resamples,
                                        opts.seed);
      rep.has_interval = true;
      rep.ci_low = ci.low;
      rep.ci_high = ci.high;
    }
    rep.curve = std::move(curve);
  }
  if (rep.t_prime)
    rep.ratio = static_cast<double>(*rep.t_prime) / static_cast<double>(horizon);
  return rep;
}

inline double oracle_value(const ArmTuple& tuple, std::uint64_t horizon, OracleKind kind,
                           const RegretOptions& opts = {}) {
  switch (kind) {
    case OracleKind::kSingleArmed: return single_armed_oracle(tuple, horizon).value;
    case OracleKind::kOptimal: return optimal_oracle_value(tuple, horizon);
    case OracleKind::kGreedy:
      if (tuple.all_discrete()) return greedy_oracle_value(tuple, horizon).value;
      return greedy_oracle_value(tuple, horizon,
                                 {CurveMode::kMonteCarlo, opts.trials, opts.seed, opts.workers})
          .value;
  }
  fail(ErrorCode::kInvalidArgument, "unknown oracle kind");
}

struct LegacyRatio {
  double gap;    // E[min policy] - E[min oracle]
  double ratio;  // E[min policy] / E[min oracle]
  double policy_value;
  double oracle_value;
};

// The pre-existing performance measures at a single horizon, in minimization
// form.
inline LegacyRatio legacy_ratio(const Policy& policy, const ArmTuple& tuple,
                                std::uint64_t horizon, const RegretOptions& opts = {}) {
  const double oracle = oracle_value(tuple, horizon, opts.oracle, opts);
  const MinCurve curve =
      opts.mode == CurveMode::kExact
          ? exact_min_curve(policy, tuple, horizon)
          : estimate_min_curve(policy, tuple, horizon, opts.trials, opts.seed, opts.workers);
  const double v = curve.at(horizon);
  return {v - oracle, v / oracle, v, oracle};
}

}  // namespace xbandit
