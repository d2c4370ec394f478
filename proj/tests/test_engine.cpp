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

#include <cmath>
#include <vector>

#include "xbandit/engine.hpp"
#include "xbandit/instances.hpp"
#include "xbandit/oracles.hpp"
#include "xbandit/regret.hpp"

using namespace xbandit;

namespace {

const ArmTuple& ones() {
  static const ArmTuple t{{Distribution::point_mass(1.0), Distribution::point_mass(1.0)}};
  return t;
}

}  // namespace

TEST(Trajectory, PointMassTuple) {
  RoundRobin rr;
  const auto tr = run_trajectory(rr, ones(), 6, 1, 0);
  for (double v : tr.values) EXPECT_EQ(v, 1.0);
  for (double b : tr.best) EXPECT_EQ(b, 1.0);
  EXPECT_EQ(tr.arms.size(), 6u);
}

TEST(Trajectory, DeterministicPerSeedAndTrial) {
  EpsGreedyMin g(0.3);
  const auto t = instances::half_vs_quarter();
  EXPECT_EQ(run_trajectory(g, t, 200, 5, 9), run_trajectory(g, t, 200, 5, 9));
  EXPECT_NE(run_trajectory(g, t, 200, 5, 9).values, run_trajectory(g, t, 200, 5, 10).values);
  const auto tr = run_trajectory(g, t, 200, 5, 9);
  double m = kInf;
  for (std::size_t n = 0; n < tr.values.size(); ++n) {
    m = std::min(m, tr.values[n]);
    EXPECT_EQ(tr.best[n], m);
  }
}

TEST(Trajectory, StepPathAgreesWithTrace) {
  UniformRandom u;
  const auto t = instances::half_vs_quarter();
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const auto tr = run_trajectory(u, t, 30, 4, trial);
    const auto path = simulate_path(u, t, 30, 4, trial);
    for (std::uint64_t h = 1; h <= 30; ++h) ASSERT_EQ(path.at(h), tr.best[h - 1]);
  }
}

TEST(MinCurve, ConstantForPointMass) {
  const auto c = estimate_min_curve(*constant_arm(0), ones(), 10, 100, 1);
  for (std::uint64_t h = 1; h <= 10; ++h) {
    EXPECT_EQ(c.at(h), 1.0);
    EXPECT_EQ(c.se_at(h), 0.0);
  }
  RoundRobin rr;
  const auto e = exact_min_curve(rr, ones(), 5);
  for (std::uint64_t h = 1; h <= 5; ++h) EXPECT_EQ(e.at(h), 1.0);
}

TEST(MinCurve, UniformMonteCarlo) {
  const auto c = estimate_min_curve(*constant_arm(0), instances::uniform_vs_one(), 9, 100000, 2);
  EXPECT_NEAR(c.at(9), 0.1, 3 * c.se_at(9));
  EXPECT_TRUE(c.isotonic_applied);
  for (std::uint64_t h = 2; h <= 9; ++h) EXPECT_LE(c.at(h), c.at(h - 1));
}

TEST(MinCurve, LateStartExactCurve) {
  const double p = 0.5;
  const auto c = exact_min_curve(*instances::late_start(), instances::bernoulli_vs_one(p), 20);
  for (std::uint64_t h = 1; h <= 20; ++h) EXPECT_NEAR(c.at(h), std::pow(p, double(h) - 1.0), 1e-15);
}

TEST(MinCurve, MixedScheduleExample) {
  FixedSequence f({0, 1});
  EXPECT_NEAR(exact_min_curve(f, instances::half_vs_quarter(), 2).at(2), 0.375, 1e-12);
}

TEST(MinCurve, ExactMatchesMonteCarlo) {
  const std::vector<ArmTuple> tuples{
      instances::bernoulli_vs_one(0.5), instances::half_vs_quarter(),
      {{make_discrete({{0.2, 0.5}, {0.9, 0.5}}), make_discrete({{0.0, 0.1}, {1.0, 0.9}})}}};
  const std::vector<PolicyPtr> policies{std::make_shared<RoundRobin>(), std::make_shared<EpsGreedyMin>(0.0),
                                        std::make_shared<QuantileThreshold>(0.3), instances::late_start()};
  int checked = 0;
  int outside = 0;
  for (std::size_t a = 0; a < tuples.size(); ++a) {
    for (std::size_t b = 0; b < policies.size(); ++b) {
      const auto exact = exact_min_curve(*policies[b], tuples[a], 6);
      const auto mc = estimate_min_curve(*policies[b], tuples[a], 6, 100000, 31 * a + b);
      for (std::uint64_t h = 1; h <= 6; ++h) {
        ++checked;
        if (std::abs(exact.at(h) - mc.at(h)) > 3 * mc.se_at(h) + 1e-15) ++outside;
      }
    }
  }
  // 72 comparisons at 3 sigma: a handful of misses would already be suspicious.
  EXPECT_LE(outside, 2) << "of " << checked;
}

TEST(MinCurve, ScheduleAndTreeAgree) {
  // Round-robin has a schedule; a table with the same arm at every node does not.
  const ArmTuple t{{make_discrete({{0.2, 0.5}, {0.9, 0.5}}), make_discrete({{0.0, 0.1}, {1.0, 0.9}})}};
  const auto alphabet = t.joint_support();
  const std::size_t nodes = PolicyTable::node_count(2, alphabet.size(), 4);
  std::vector<std::size_t> arms(nodes);
  // Depth-d nodes play arm (d mod 2): level d starts at node_count(.., d).
  for (std::size_t d = 0; d < 4; ++d)
    for (std::size_t n = PolicyTable::node_count(2, alphabet.size(), d); n < PolicyTable::node_count(2, alphabet.size(), d + 1); ++n)
      arms[n] = d % 2;
  PolicyTable table(2, alphabet, 4, arms);
  RoundRobin rr;
  const auto a = exact_min_curve(rr, t, 4);
  const auto b = exact_min_curve(table, t, 4);
  for (std::uint64_t h = 1; h <= 4; ++h) EXPECT_NEAR(a.at(h), b.at(h), 1e-15);
}

TEST(MinCurve, UniformScheduleCurve) {
  // Uniform arm pulled n times: 1/(n+1), delayed by one step.
  const auto c = exact_min_curve(*instances::late_start(), instances::uniform_vs_one(), 10);
  EXPECT_EQ(c.at(1), 1.0);
  for (std::uint64_t h = 2; h <= 10; ++h) EXPECT_NEAR(c.at(h), 1.0 / double(h), 1e-14);
}

TEST(MinCurve, LeafBudget) {
  EpsGreedyMin g(0.0);
  try {
    exact_min_curve(g, instances::half_vs_quarter(), 40);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(MinCurve, IsotonicViolationsAreSmall) {
  // Raw estimates may rise only by sampling noise.
  UniformRandom u;
  int runs_with_big_violation = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = estimate_min_curve(u, instances::half_vs_quarter(), 50, 2000, seed);
    if (c.max_violation_se > 4.0) ++runs_with_big_violation;
    for (std::uint64_t h = 2; h <= 50; ++h) ASSERT_LE(c.at(h), c.at(h - 1));
  }
  EXPECT_EQ(runs_with_big_violation, 0);
}

TEST(MinCurve, WorkerCountDoesNotChangeBits) {
  EpsGreedyMin g(0.2);
  const auto t = instances::half_vs_quarter();
  const auto a = estimate_min_curve(g, t, 100, 3000, 17, 1);
  const auto b = estimate_min_curve(g, t, 100, 3000, 17, 8);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Regret, BernoulliInstanceExact) {
  const auto t = instances::bernoulli_vs_one(0.5);
  const auto p = instances::late_start();
  for (std::uint64_t h = 1; h <= 20; ++h) {
    const double oracle = single_armed_oracle(t, h).value;
    const auto r = extreme_regret(*p, t, h, oracle);
    ASSERT_TRUE(r.t_prime);
    EXPECT_EQ(*r.t_prime, h + 1);
    EXPECT_DOUBLE_EQ(r.ratio, double(h + 1) / double(h));
    const auto legacy = legacy_ratio(*p, t, h);
    EXPECT_NEAR(legacy.ratio, 2.0, 1e-12);
    EXPECT_NEAR(legacy.gap, std::pow(0.5, double(h) - 1.0) - std::pow(0.5, double(h)), 1e-15);
  }
}

TEST(Regret, UniformInstanceExact) {
  const auto t = instances::uniform_vs_one();
  const auto p = instances::late_start();
  for (std::uint64_t h = 1; h <= 20; ++h) {
    const auto r = extreme_regret(*p, t, h, single_armed_oracle(t, h).value);
    ASSERT_TRUE(r.t_prime);
    EXPECT_EQ(*r.t_prime, h + 1);
  }
  for (std::uint64_t h : {10, 100})
    EXPECT_NEAR(legacy_ratio(*p, t, h).ratio, double(h + 1) / double(h), 1e-12);
}

TEST(Regret, OracleAgainstItself) {
  const auto t = instances::half_vs_quarter();
  for (std::uint64_t h : {2, 5, 9}) {
    const auto o = single_armed_oracle(t, h);
    const auto r = extreme_regret(*constant_arm(o.arm), t, h, o.value);
    ASSERT_TRUE(r.t_prime);
    EXPECT_LE(r.ratio, 1.0);
    const auto legacy = legacy_ratio(*constant_arm(o.arm), t, h);
    EXPECT_NEAR(legacy.ratio, 1.0, 1e-15);
    EXPECT_NEAR(legacy.gap, 0.0, 1e-15);
  }
}

TEST(Regret, UnreachableTargetIsInfinity) {
  const auto t = instances::half_vs_quarter();
  const auto r = extreme_regret(*constant_arm(0), t, 5, single_armed_oracle(t, 5).value);
  EXPECT_FALSE(r.t_prime);
  EXPECT_TRUE(std::isinf(r.ratio));
  EXPECT_EQ(r.cap, 40u);
}

TEST(Regret, MonteCarloWithBootstrap) {
  const auto t = instances::bernoulli_vs_one(0.5);
  const auto p = instances::late_start();
  RegretOptions opts;
  opts.mode = CurveMode::kMonteCarlo;
  opts.trials = 20000;
  opts.seed = 3;
  opts.bootstrap_resamples = 200;
  const auto r = extreme_regret(*p, t, 4, single_armed_oracle(t, 4).value, opts);
  ASSERT_TRUE(r.t_prime);
  EXPECT_TRUE(r.has_interval);
  ASSERT_TRUE(r.ci_low && r.ci_high);
  EXPECT_LE(*r.ci_low, *r.ci_high);
  EXPECT_LE(*r.ci_low, 5u);
  EXPECT_GE(*r.ci_high, 5u);
  // Same seed, same report.
  const auto again = extreme_regret(*p, t, 4, single_armed_oracle(t, 4).value, opts);
  EXPECT_EQ(r.t_prime, again.t_prime);
  EXPECT_EQ(r.ci_low, again.ci_low);
  EXPECT_EQ(r.ci_high, again.ci_high);
}

TEST(Regret, BootstrapWithoutResamplingReproducesPointEstimate) {
  // With all weights 1 the weighted crossing is the curve's own crossing.
  const auto t = instances::half_vs_quarter();
  UniformRandom u;
  const auto paths = simulate_paths(u, t, 60, 500, 8);
  const auto curve = curve_from_paths(paths, 60, 8);
  const double target = 0.2;
  const auto events = detail::path_events(paths);
  const std::vector<double> w(paths.size(), 1.0);
  EXPECT_EQ(detail::weighted_crossing(events, w, double(paths.size()), target, 60),
            first_at_or_below(curve, target));
}
