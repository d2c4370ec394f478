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

// Small hand-checkable instances used by the CLI and the tests.

#include <cstddef>

#include "xbandit/distribution.hpp"
#include "xbandit/error.hpp"
#include "xbandit/policy.hpp"

namespace xbandit::instances {

// Arm 0 is 0 with probability 1 - p and 1 with probability p; arm 1 is always 1.
inline ArmTuple bernoulli_vs_one(double p) {
  require(p > 0.0 && p < 1.0, ErrorCode::kOutOfRange, "p must lie in (0, 1)");
  return {{make_discrete({{0.0, 1.0 - p}, {1.0, p}}), Distribution::point_mass(1.0)}};
}

// Arm 0 uniform on [0, 1]; arm 1 always 1.
inline ArmTuple uniform_vs_one() { return {{Distribution::uniform01(), Distribution::point_mass(1.0)}}; }

// Arm 0 always 1/2; arm 1 is 0 w.p. 1/4 and 1 w.p. 3/4. Mixing beats either arm at T = 2.
inline ArmTuple half_vs_quarter() {
  return {{Distribution::point_mass(0.5), make_discrete({{0.0, 0.25}, {1.0, 0.75}})}};
}

// One wasted pull on arm 1, then arm 0 forever.
inline PolicyPtr late_start() { return std::make_shared<FixedSequence>(std::vector<std::size_t>{1, 0}); }

}  // namespace xbandit::instances
