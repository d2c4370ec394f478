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

// The adversarial family of point-mass tuples. Arm k receives an atom of
// mass alpha_j at value alpha_j for every j assigned to it, and the rest of
// its mass sits on the value 1. Sequences are finite: alpha_j is taken to
// be 0 beyond the stored prefix.

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xbandit/distribution.hpp"
#include "xbandit/error.hpp"
#include "xbandit/log_math.hpp"
#include "xbandit/rng.hpp"

namespace xbandit {

// Rounding slack for every log-domain inequality.
inline constexpr double kLogSlack = 1e-12;

inline constexpr std::size_t kMaxCanonicalIndex = 8;

enum class AlphaSource { kCanonical, kUser };

struct AlphaSequence {
  std::size_t arms = 2;             // K
  std::vector<double> log_alphas;   // log_alphas[i - 1] = log alpha_i
  AlphaSource source = AlphaSource::kUser;

  std::size_t size() const { return log_alphas.size(); }

  // 1-based, matching the usual indexing of the sequence.
  double log_alpha(std::size_t i) const { return log_alphas.at(i - 1); }
  double alpha(std::size_t i) const { return std::exp(log_alpha(i)); }
};

// log alpha_i = -(i!)^2 log(8K).
inline double canonical_alpha(std::size_t arms, std::size_t i) {
  require(arms >= 2, ErrorCode::kInvalidArgument, "canonical sequence needs K >= 2");
  require(i >= 1, ErrorCode::kInvalidArgument, "sequence index starts at 1");
  if (i > kMaxCanonicalIndex)
    fail(ErrorCode::kIndexTooLarge, "canonical index " + std::to_string(i) + " exceeds 8");
  double factorial = 1.0;
  for (std::size_t m = 2; m <= i; ++m) factorial *= static_cast<double>(m);
  return -(factorial * factorial) * std::log(8.0 * static_cast<double>(arms));
}

inline AlphaSequence canonical_sequence(std::size_t arms, std::size_t length) {
  AlphaSequence a{arms, {}, AlphaSource::kCanonical};
  for (std::size_t i = 1; i <= length; ++i) a.log_alphas.push_back(canonical_alpha(arms, i));
  return a;
}

inline AlphaSequence sequence_from_logs(std::size_t arms, std::vector<double> log_alphas,
                                        AlphaSource source = AlphaSource::kUser) {
  require(arms >= 1, ErrorCode::kInvalidArgument, "need at least one arm");
  require(!log_alphas.empty(), ErrorCode::kInvalidArgument, "alpha sequence is empty");
  for (double la : log_alphas)
    require(la < 0.0 && la > kNegInf, ErrorCode::kOutOfRange, "every alpha must lie in (0, 1)");
  return {arms, std::move(log_alphas), source};
}

inline AlphaSequence sequence_from_values(std::size_t arms, const std::vector<double>& alphas) {
  std::vector<double> logs;
  for (double a : alphas) {
    require(a > 0.0 && a < 1.0, ErrorCode::kOutOfRange, "every alpha must lie in (0, 1)");
    logs.push_back(std::log(a));
  }
  return sequence_from_logs(arms, std::move(logs));
}

// Two-term sequence small enough to simulate: alpha_2 sits just inside
// alpha_2 <= alpha_1^2 / 4, and T_2, T_2' are in the thousands.
inline AlphaSequence desk_preset(std::size_t arms = 2) {
  return sequence_from_values(arms, {0.05, 0.99 * 0.05 * 0.05 / 4.0});
}

struct PropertyCheck {
  bool holds = true;
  double margin = kInf;  // log(rhs) - log(lhs); negative means violated
  bool applicable = true;
};

/// Per-index results of the four sequence conditions
///   (A) sum_j alpha_j <= 1/2
///   (B) alpha_i <= 1 / (4 (1 + i))
///   (C) sum_{j > i} alpha_j <= alpha_i / (i K)
///   (D) alpha_i <= alpha_{i-1}^i 2^-i   (i >= 2)
/// Index 0 of each vector is i = 1.
struct PropertyReport {
  std::vector<PropertyCheck> a, b, c, d;
  bool strictly_decreasing = true;

  static bool all(const std::vector<PropertyCheck>& v, std::size_t from) {
    for (std::size_t i = from; i <= v.size(); ++i)
      if (!v[i - 1].holds) return false;
    return true;
  }
  bool holds_a() const { return all(a, 1); }
  bool all_hold() const { return all(a, 1) && all(b, 1) && all(c, 1) && all(d, 1); }
};

inline PropertyCheck log_leq(double lhs, double rhs, bool applicable = true) {
  if (!applicable) return {true, kInf, false};
  const double margin = rhs == kNegInf && lhs == kNegInf ? 0.0 : rhs - lhs;
  return {lhs <= rhs + kLogSlack, margin, true};
}

inline PropertyReport validate_alpha_sequence(const AlphaSequence& seq) {
  require(seq.size() >= 1, ErrorCode::kInvalidArgument, "alpha sequence is empty");
  const std::size_t n = seq.size();
  const double log_k = std::log(static_cast<double>(seq.arms));
  // tail[i] = log sum_{j > i} alpha_j (1-based i, tail[n] empty).
  std::vector<double> tail(n + 1, kNegInf);
  for (std::size_t i = n; i-- > 0;) tail[i] = log_add(tail[i + 1], seq.log_alphas[i]);
  const double log_total = tail[0];

  PropertyReport r;
  for (std::size_t i = 1; i <= n; ++i) {
    const double la = seq.log_alpha(i);
    const auto di = static_cast<double>(i);
    r.a.push_back(log_leq(log_total, -std::log(2.0)));
    r.b.push_back(log_leq(la, -std::log(4.0 * (1.0 + di))));
    r.c.push_back(log_leq(tail[i], la - std::log(di) - log_k));
    if (i >= 2) {
      r.d.push_back(log_leq(la, di * seq.log_alpha(i - 1) - di * std::log(2.0)));
      if (!(la < seq.log_alpha(i - 1))) r.strictly_decreasing = false;
    } else {
      r.d.push_back(log_leq(0.0, 0.0, false));
    }
  }
  return r;
}

/// b_i in {0..K-1} names the arm holding the atom at alpha_i.
struct BAssignment {
  std::vector<std::size_t> arms;
  std::size_t size() const { return arms.size(); }
  friend bool operator==(const BAssignment&, const BAssignment&) = default;
};

// Each entry independently uniform over the K arms; entry j uses time j of the
// stream, so prefixes of longer assignments agree.
inline BAssignment sample_b(std::size_t arms, std::size_t length, const RngStream& stream) {
  require(arms >= 1 && length >= 1, ErrorCode::kInvalidArgument, "sample_b needs K, I >= 1");
  BAssignment b;
  for (std::size_t j = 0; j < length; ++j) b.arms.push_back(stream.at_time(j).index(arms));
  return b;
}

// Every b in {0..K-1}^length, lexicographic.
inline std::vector<BAssignment> all_assignments(std::size_t arms, std::size_t length) {
  std::vector<BAssignment> out;
  BAssignment b{std::vector<std::size_t>(length, 0)};
  while (true) {
    out.push_back(b);
    std::size_t pos = length;
    while (pos > 0 && ++b.arms[pos - 1] == arms) b.arms[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

enum class TupleKind { kPure, kMixture };

struct ConstructedTuple {
  ArmTuple tuple;
  TupleKind kind = TupleKind::kPure;
  BAssignment b;
  std::optional<std::size_t> designated;  // the index i singled out, if any
  std::vector<double> gammas;             // mass at 1 per arm
  std::vector<double> omegas;             // 1 - sum_{j != i, b_j = k} alpha_j
  std::vector<double> betas;              // alpha_i / omega_k
};

namespace detail {

inline void check_shapes(const AlphaSequence& seq, const BAssignment& b) {
  require(b.size() == seq.size(), ErrorCode::kInvalidArgument,
          "assignment length differs from alpha sequence length");
  for (std::size_t k : b.arms)
    require(k < seq.arms, ErrorCode::kOutOfRange, "assignment names a nonexistent arm");
  const auto report = validate_alpha_sequence(seq);
  require(report.holds_a(), ErrorCode::kPropertyViolation,
          "sum of alphas exceeds 1/2; the construction's premises fail");
}

inline double atom_value(double log_alpha) {
  const double v = std::exp(log_alpha);
  require(v >= DBL_MIN, ErrorCode::kOutOfRange,
          "alpha = exp(" + std::to_string(log_alpha) + ") underflows double precision");
  return v;
}

// log sum_{j in J, b_j = k} alpha_j with J = all indices except `skip`.
inline double log_arm_mass(const AlphaSequence& seq, const BAssignment& b, std::size_t k,
                           std::optional<std::size_t> skip) {
  double acc = kNegInf;
  for (std::size_t j = 1; j <= seq.size(); ++j) {
    if (skip && *skip == j) continue;
    if (b.arms[j - 1] == k) acc = log_add(acc, seq.log_alpha(j));
  }
  return acc;
}

inline void fill_designated(ConstructedTuple& out, const AlphaSequence& seq, std::size_t i) {
  out.designated = i;
  out.omegas.clear();
  out.betas.clear();
  for (std::size_t k = 0; k < seq.arms; ++k) {
    const double log_omega = log1mexp(log_arm_mass(seq, out.b, k, i));
    out.omegas.push_back(std::exp(log_omega));
    out.betas.push_back(std::exp(seq.log_alpha(i) - log_omega));
  }
}

}  // namespace detail

inline ConstructedTuple build_tuple(const AlphaSequence& seq, const BAssignment& b) {
  detail::check_shapes(seq, b);
  ConstructedTuple out;
  out.b = b;
  for (std::size_t k = 0; k < seq.arms; ++k) {
    std::vector<LogAtom> atoms;
    for (std::size_t j = 1; j <= seq.size(); ++j) {
      if (b.arms[j - 1] == k)
        atoms.push_back({detail::atom_value(seq.log_alpha(j)), seq.log_alpha(j)});
    }
    const double log_gamma = log1mexp(detail::log_arm_mass(seq, b, k, std::nullopt));
    atoms.push_back({1.0, log_gamma});
    out.gammas.push_back(std::exp(log_gamma));
    out.tuple.arms.push_back(Distribution::from_log_atoms(std::move(atoms)));
  }
  return out;
}

inline void require_index(const AlphaSequence& seq, std::size_t i) {
  require(i >= 1 && i <= seq.size(), ErrorCode::kOutOfRange,
          "index " + std::to_string(i) + " outside the stored sequence");
}

// The K tuples that agree with b everywhere except b_i, which runs over all
// arms.
inline std::vector<ConstructedTuple> sibling_tuples(const AlphaSequence& seq,
                                                    const BAssignment& b, std::size_t i) {
  require_index(seq, i);
  std::vector<ConstructedTuple> out;
  for (std::size_t k = 0; k < seq.arms; ++k) {
    BAssignment bk = b;
    bk.arms.at(i - 1) = k;
    auto t = build_tuple(seq, bk);
    detail::fill_designated(t, seq, i);
    out.push_back(std::move(t));
  }
  return out;
}

// Arm-wise average of the siblings: each arm carries alpha_i / K at alpha_i.
inline ConstructedTuple build_mixture(const AlphaSequence& seq, const BAssignment& b,
                                      std::size_t i) {
  require_index(seq, i);
  detail::check_shapes(seq, b);
  ConstructedTuple out;
  out.kind = TupleKind::kMixture;
  out.b = b;
  const double log_k = std::log(static_cast<double>(seq.arms));
  const double log_shared = seq.log_alpha(i) - log_k;
  for (std::size_t k = 0; k < seq.arms; ++k) {
    std::vector<LogAtom> atoms{{detail::atom_value(seq.log_alpha(i)), log_shared}};
    for (std::size_t j = 1; j <= seq.size(); ++j) {
      if (j != i && b.arms[j - 1] == k)
        atoms.push_back({detail::atom_value(seq.log_alpha(j)), seq.log_alpha(j)});
    }
    const double log_gamma = log1mexp(log_add(detail::log_arm_mass(seq, b, k, i), log_shared));
    atoms.push_back({1.0, log_gamma});
    out.gammas.push_back(std::exp(log_gamma));
    out.tuple.arms.push_back(Distribution::from_log_atoms(std::move(atoms)));
  }
  detail::fill_designated(out, seq, i);
  return out;
}

// Largest integer horizon handed out; beyond this only log values are exact
// enough to be useful.
inline constexpr double kMaxHorizon = 9007199254740992.0;  // 2^53

// log of log(1/alpha) / alpha.
inline double log_horizon_T(double log_alpha) { return std::log(-log_alpha) - log_alpha; }

// T_i = ceil(log(1/alpha_i) / alpha_i).
inline std::int64_t horizon_T(double log_alpha) {
  require(log_alpha < 0.0, ErrorCode::kOutOfRange, "alpha must lie in (0, 1)");
  const double x = -log_alpha * std::exp(-log_alpha);
  if (!(x < kMaxHorizon))
    throw HorizonOverflow(log_horizon_T(log_alpha), "T_i does not fit a 53-bit integer");
  return static_cast<std::int64_t>(std::ceil(x));
}

// c_i = (1 - 1/i) / ((1 + 1/i)^2 + 2/i); zero at i = 1 and tending to 1.
inline double horizon_correction(std::size_t i) {
  require(i >= 1, ErrorCode::kInvalidArgument, "index starts at 1");
  const double inv = 1.0 / static_cast<double>(i);
  return (1.0 - inv) / ((1.0 + inv) * (1.0 + inv) + 2.0 * inv);
}

struct HorizonPrime {
  std::int64_t value;
  double correction;  // c_i
};

inline double log_horizon_Tprime(double log_alpha, std::size_t i, std::size_t arms) {
  return std::log(horizon_correction(i)) + std::log(static_cast<double>(arms)) +
         log_horizon_T(log_alpha);
}

// T_i' = floor(c_i K log(1/alpha_i) / alpha_i).
inline HorizonPrime horizon_Tprime(double log_alpha, std::size_t i, std::size_t arms) {
  require(log_alpha < 0.0, ErrorCode::kOutOfRange, "alpha must lie in (0, 1)");
  const double c = horizon_correction(i);
  const double x = c * static_cast<double>(arms) * -log_alpha * std::exp(-log_alpha);
  if (!(x < kMaxHorizon))
    throw HorizonOverflow(log_horizon_Tprime(log_alpha, i, arms),
                          "T_i' does not fit a 53-bit integer");
  return {static_cast<std::int64_t>(std::floor(x)), c};
}

}  // namespace xbandit
