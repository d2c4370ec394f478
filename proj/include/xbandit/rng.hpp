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

#include <array>
#include <cstddef>
#include <cstdint>

namespace xbandit {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2,
// 3", SC 2011). A keyed bijection on 128-bit counters: no state, so any
// element of any stream can be produced independently of all others.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

// SplitMix64 finalizer; used only to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(mix64(seed) ^ (salt * 0xd6e8feb86659fd93ull));
}

// Disjoint purposes within one (seed, trial, time) address.
enum class Lane : std::uint32_t {
  kArm = 0,
  kPolicy = 1,
  kAssignment = 2,
  kBootstrap = 3,
  kCheck = 4,
};

/// Address of a reproducible random sub-stream.
///
/// The same (seed, trial, time, lane) always yields the same values, and
/// distinct addresses map to distinct Philox counters. Each address exposes an
/// indexed sequence of draws via `uniform(d)`.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t time = 0;
  Lane lane = Lane::kArm;

  constexpr RngStream with_lane(Lane l) const { return {seed, trial, time, l}; }
  constexpr RngStream at_time(std::uint64_t t) const { return {seed, trial, t, lane}; }

  // 64 random bits for draw index `d`.
  constexpr std::uint64_t bits(std::uint32_t d = 0) const {
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(time), static_cast<std::uint32_t>(time >> 32),
        static_cast<std::uint32_t>(trial),
        static_cast<std::uint32_t>((trial >> 32) & 0xFFFFu) |
            (static_cast<std::uint32_t>(lane) << 16) | ((d >> 1) << 24)};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                                 static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::generate(ctr, key);
    const std::size_t half = (d & 1u) * 2;
    return (static_cast<std::uint64_t>(out[half]) << 32) | out[half + 1];
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint32_t d = 0) const {
    return static_cast<double>(bits(d) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  constexpr std::size_t index(std::size_t n, std::uint32_t d = 0) const {
    const auto k = static_cast<std::size_t>(uniform(d) * static_cast<double>(n));
    return k < n ? k : n - 1;
  }
};

}  // namespace xbandit
