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

#include "xbandit/construction.hpp"
#include "xbandit/stats.hpp"

using namespace xbandit;

TEST(Construction, CanonicalAlpha) {
  EXPECT_NEAR(canonical_alpha(2, 1), std::log(1.0 / 16.0), 1e-15);
  EXPECT_NEAR(canonical_alpha(2, 2), -4.0 * std::log(16.0), 1e-13);
  EXPECT_NEAR(canonical_alpha(3, 1), std::log(1.0 / 24.0), 1e-15);
  EXPECT_NEAR(canonical_alpha(2, 8), -(40320.0 * 40320.0) * std::log(16.0), 1.0);
  try {
    canonical_alpha(2, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexTooLarge);
  }
  EXPECT_THROW(canonical_alpha(1, 1), Error);
}

TEST(Construction, CanonicalSequencePassesAllProperties) {
  for (std::size_t k : {2, 3, 5}) {
    const auto r = validate_alpha_sequence(canonical_sequence(k, 4));
    EXPECT_TRUE(r.all_hold()) << k;
    EXPECT_TRUE(r.strictly_decreasing);
    for (std::size_t i = 2; i <= 4; ++i) EXPECT_GT(r.d[i - 1].margin, 0.0);
  }
  // Every index up to 8 still validates in log space.
  EXPECT_TRUE(validate_alpha_sequence(canonical_sequence(2, 8)).all_hold());
}

TEST(Construction, PropertyExamples) {
  // Sum 0.6 exceeds 1/2, so (A) fails too; (D) fails at i = 2 as well.
  const auto big = validate_alpha_sequence(sequence_from_values(2, {0.3, 0.3}));
  EXPECT_FALSE(big.holds_a());
  EXPECT_FALSE(big.d[1].holds);
  EXPECT_FALSE(big.strictly_decreasing);

  const auto d_fail = validate_alpha_sequence(sequence_from_values(2, {0.3, 0.2}));
  EXPECT_FALSE(d_fail.d[1].holds);

  const auto desk = validate_alpha_sequence(desk_preset());
  EXPECT_TRUE(desk.all_hold());
  EXPECT_TRUE(desk.d[1].holds);
  EXPECT_FALSE(desk.d[0].applicable);
}

TEST(Construction, BuildTupleAtoms) {
  const auto seq = sequence_from_values(2, {1.0 / 16.0, 1.0 / 65536.0});
  const auto t = build_tuple(seq, BAssignment{{0, 1}});
  ASSERT_EQ(t.tuple.size(), 2u);
  EXPECT_EQ(t.tuple[0].support()[0], 1.0 / 16.0);
  EXPECT_NEAR(t.tuple[0].prob(0), 1.0 / 16.0, 1e-16);
  EXPECT_NEAR(t.tuple[0].prob(1), 15.0 / 16.0, 1e-15);
  EXPECT_NEAR(t.tuple[1].prob(0), 1.0 / 65536.0, 1e-19);
  EXPECT_NEAR(t.gammas[1], 65535.0 / 65536.0, 1e-15);
}

TEST(Construction, DegenerateAssignments) {
  const auto seq = desk_preset(1);
  const auto one = build_tuple(seq, BAssignment{{0, 0}});
  ASSERT_EQ(one.tuple.size(), 1u);
  EXPECT_EQ(one.tuple[0].size(), 3u);

  const auto empty_arm = build_tuple(desk_preset(2), BAssignment{{0, 0}});
  EXPECT_EQ(empty_arm.tuple[1], Distribution::point_mass(1.0));
  EXPECT_EQ(empty_arm.gammas[1], 1.0);
}

TEST(Construction, BuildTupleRequiresPropertyA) {
  try {
    build_tuple(sequence_from_values(2, {0.3, 0.3}), BAssignment{{0, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPropertyViolation);
  }
  EXPECT_THROW(build_tuple(desk_preset(), BAssignment{{0}}), Error);
  EXPECT_THROW(build_tuple(desk_preset(), BAssignment{{0, 2}}), Error);
}

TEST(Construction, UnderflowingAtomsAreRejected) {
  // alpha_4 = 16^-576 is far below the smallest double.
  try {
    build_tuple(canonical_sequence(2, 4), BAssignment{{0, 1, 0, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_NO_THROW(build_tuple(canonical_sequence(2, 3), BAssignment{{0, 1, 0}}));
}

TEST(Construction, GammasAtLeastHalfAndMassesNormalized) {
  const auto seq = canonical_sequence(3, 3);
  for (const auto& b : all_assignments(3, 3)) {
    const auto t = build_tuple(seq, b);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_GE(t.gammas[k], 0.5);
      EXPECT_NEAR(std::expm1(log_sum_exp(t.tuple[k].log_probs())), 0.0, 1e-12);
    }
  }
}

TEST(Construction, SiblingsDifferOnlyAtDesignatedIndex) {
  const auto seq = desk_preset();
  const BAssignment b{{0, 0}};
  const auto sib = sibling_tuples(seq, b, 2);
  ASSERT_EQ(sib.size(), 2u);
  EXPECT_EQ(sib[0].b.arms, (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(sib[1].b.arms, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(*sib[1].designated, 2u);
  EXPECT_NEAR(sib[0].omegas[0], 1.0 - 0.05, 1e-15);
  EXPECT_NEAR(sib[0].betas[0], seq.alpha(2) / 0.95, 1e-18);
  EXPECT_THROW(sibling_tuples(seq, b, 3), Error);
}

TEST(Construction, MixtureIsAtomwiseAverageOfSiblings) {
  for (std::size_t k_arms : {1, 2, 3}) {
    const auto seq = desk_preset(k_arms);
    for (const auto& b : all_assignments(k_arms, 2)) {
      for (std::size_t i = 1; i <= 2; ++i) {
        const auto sib = sibling_tuples(seq, b, i);
        const auto mix = build_mixture(seq, b, i);
        for (std::size_t k = 0; k < k_arms; ++k) {
          std::vector<Distribution> parts;
          double gamma_avg = 0.0;
          for (const auto& s : sib) {
            parts.push_back(s.tuple[k]);
            gamma_avg += s.gammas[k] / static_cast<double>(k_arms);
          }
          EXPECT_TRUE(approx_equal(mix.tuple[k], average(parts), 1e-15));
          EXPECT_NEAR(mix.gammas[k], gamma_avg, 1e-15);
          // The alpha_i atom is the smallest value only for the last index.
          if (i == 2) {
            EXPECT_NEAR(mix.tuple[k].prob(0), seq.alpha(i) / static_cast<double>(k_arms), 1e-18);
          }
        }
        if (k_arms == 1) {
          EXPECT_TRUE(approx_equal(mix.tuple[0], build_tuple(seq, b).tuple[0], 1e-15));
        }
      }
    }
  }
}

TEST(Construction, Horizons) {
  EXPECT_EQ(horizon_T(std::log(0.01)), 461);
  EXPECT_EQ(horizon_T(std::log(1.0 / 16.0)), 45);
  EXPECT_EQ(horizon_T(-1.0), 3);
  EXPECT_NEAR(horizon_correction(2), 2.0 / 13.0, 1e-16);
  EXPECT_EQ(horizon_correction(1), 0.0);
  EXPECT_NEAR(horizon_correction(1000000), 1.0, 1e-5);
  EXPECT_EQ(horizon_Tprime(std::log(6e-4), 2, 2).value, 3804);
  EXPECT_EQ(horizon_Tprime(std::log(0.05), 1, 2).value, 0);
}

TEST(Construction, HorizonOverflowCarriesLogValue) {
  const double la = canonical_alpha(2, 3);
  try {
    horizon_T(la);
    FAIL();
  } catch (const HorizonOverflow& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHorizonOverflow);
    EXPECT_NEAR(e.log_horizon(), std::log(-la) - la, 1e-9);
  }
  EXPECT_NO_THROW(horizon_T(canonical_alpha(2, 1)));
}

TEST(Construction, HorizonRatioApproachesCK) {
  for (double a : {1e-3, 1e-6, 1e-9, 1e-12}) {
    for (std::size_t i : {2, 5, 50}) {
      const auto t = static_cast<double>(horizon_T(std::log(a)));
      const auto tp = horizon_Tprime(std::log(a), i, 3);
      const double ratio = static_cast<double>(tp.value) / t;
      EXPECT_NEAR(ratio, tp.correction * 3.0, 3.0 / t + 1e-12);
    }
  }
}

TEST(Construction, SampleBIsUniformAndDeterministic) {
  const RngStream s{4, 0, 0, Lane::kAssignment};
  EXPECT_EQ(sample_b(3, 5, s), sample_b(3, 5, s));
  EXPECT_EQ(sample_b(1, 4, s).arms, (std::vector<std::size_t>(4, 0)));
  const int n = 10000;
  std::vector<int> counts(3, 0);
  for (int r = 0; r < n; ++r)
    ++counts[sample_b(3, 2, RngStream{4, static_cast<std::uint64_t>(r), 0, Lane::kAssignment}).arms[1]];
  for (int c : counts) EXPECT_NEAR(c / double(n), 1.0 / 3.0, 3 * proportion_se(1.0 / 3.0, n));
}

TEST(Construction, AllAssignmentsEnumeratesLexicographically) {
  const auto all = all_assignments(2, 3);
  ASSERT_EQ(all.size(), 8u);
  EXPECT_EQ(all.front().arms, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(all[1].arms, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(all.back().arms, (std::vector<std::size_t>{1, 1, 1}));
}
