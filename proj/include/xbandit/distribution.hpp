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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xbandit/error.hpp"
#include "xbandit/log_math.hpp"
#include "xbandit/rng.hpp"

namespace xbandit {

// Sentinel best-so-far before any observation. min(x, kNoObservation) == x,
// so E[min(X, kNoObservation)] == E[X] falls out of the arithmetic.
inline constexpr double kNoObservation = kInf;

inline constexpr double kNormalizationTolerance = 1e-12;

enum class DistributionKind { kDiscrete, kUniform01 };

struct Atom {
  double value;
  double prob;
};

struct LogAtom {
  double value;
  double log_prob;
};

/// One arm: either a finite discrete law on [0, 1] or the uniform law on
/// [0, 1].
///
/// Discrete atoms are kept sorted by value with equal values merged, and
/// their masses are stored as log-probabilities so that atoms as light as
/// exp(-10^4) survive products and powers. Instances are immutable.
class Distribution {
 public:
  static Distribution uniform01() { return Distribution(DistributionKind::kUniform01); }

  static Distribution point_mass(double value) { return from_log_atoms({{value, 0.0}}); }

  // Atoms may arrive unsorted and with repeated values.
  static Distribution from_log_atoms(std::vector<LogAtom> atoms) {
    require(!atoms.empty(), ErrorCode::kNonNormalized, "distribution has no atoms");
    for (const auto& a : atoms) {
      require(std::isfinite(a.value) && a.value >= 0.0 && a.value <= 1.0, ErrorCode::kOutOfRange,
              "atom value " + std::to_string(a.value) + " outside [0, 1]");
      require(a.log_prob != kNegInf && !std::isnan(a.log_prob) && a.log_prob <= 1e-12,
              ErrorCode::kOutOfRange, "atom probability must lie in (0, 1]");
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const LogAtom& a, const LogAtom& b) { return a.value < b.value; });
    Distribution d(DistributionKind::kDiscrete);
    for (const auto& a : atoms) {
      if (!d.support_.empty() && d.support_.back() == a.value) {
        d.log_probs_.back() = log_add(d.log_probs_.back(), a.log_prob);
      } else {
        d.support_.push_back(a.value);
        d.log_probs_.push_back(a.log_prob);
      }
    }
    const double total = log_sum_exp(d.log_probs_);
    require(std::abs(std::expm1(total)) <= kNormalizationTolerance, ErrorCode::kNonNormalized,
            "probabilities sum to 1 + " + std::to_string(std::expm1(total)));
    d.precompute();
    return d;
  }

  DistributionKind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == DistributionKind::kDiscrete; }
  bool is_continuous() const { return kind_ == DistributionKind::kUniform01; }

  // Empty for uniform01.
  std::span<const double> support() const { return support_; }
  std::span<const double> log_probs() const { return log_probs_; }
  std::size_t size() const { return support_.size(); }
  double prob(std::size_t j) const { return std::exp(log_probs_[j]); }

  double min_value() const { return is_discrete() ? support_.front() : 0.0; }
  double max_value() const { return is_discrete() ? support_.back() : 1.0; }

  // P[X >= v]; an atom sitting exactly at v is included.
  double survival(double v) const { return std::exp(log_survival(v)); }

  double log_survival(double v) const {
    if (!is_discrete()) {
      if (v <= 0.0) return 0.0;
      if (v >= 1.0) return kNegInf;
      return std::log1p(-v);
    }
    const auto it = std::lower_bound(support_.begin(), support_.end(), v);
    if (it == support_.end()) return kNegInf;
    return log_surv_[static_cast<std::size_t>(it - support_.begin())];
  }

  // P[X > v].
  double strict_survival(double v) const {
    if (!is_discrete()) return std::clamp(1.0 - v, 0.0, 1.0);
    const auto it = std::upper_bound(support_.begin(), support_.end(), v);
    if (it == support_.end()) return 0.0;
    return std::exp(log_surv_[static_cast<std::size_t>(it - support_.begin())]);
  }

  double mean() const { return expected_min_capped(kNoObservation); }

  // E[min of `draws` independent samples], exactly.
  //   E[min] = sum_j v_j (S_j^T - S_{j+1}^T),  S_j = P[X >= v_j]
  // with each power taken in log space.
  double expected_min(std::uint64_t draws) const {
    require(draws >= 1, ErrorCode::kInvalidArgument, "expected_min needs at least one draw");
    const auto n = static_cast<double>(draws);
    if (!is_discrete()) return 1.0 / (n + 1.0);
    CompensatedSum acc;
    for (std::size_t j = 0; j < support_.size(); ++j) {
      const double ls = log_surv_[j];
      const double ls_next = j + 1 < support_.size() ? log_surv_[j + 1] : kNegInf;
      // S_j^T - S_{j+1}^T = S_j^T (1 - exp(T (log S_{j+1} - log S_j)))
      const double mass = std::exp(n * ls) * -std::expm1(n * (ls_next - ls));
      acc.add(support_[j] * mass);
    }
    return acc.value();
  }

  // E[min(X, cap)]. cap == kNoObservation gives E[X].
  double expected_min_capped(double cap) const {
    if (!is_discrete()) {
      if (cap >= 1.0) return 0.5;
      if (cap <= 0.0) return cap;
      return cap - 0.5 * cap * cap;
    }
    CompensatedSum acc;
    for (std::size_t j = 0; j < support_.size(); ++j) {
      acc.add(std::exp(log_probs_[j]) * std::min(support_[j], cap));
    }
    return acc.value();
  }

  // Inverse-CDF sampling from draw 0 of the stream. Ties go to the lower
  // index; atoms lighter than 2^-53 are below the sampler's resolution.
  double sample(const RngStream& stream) const {
    const double u = stream.uniform(0);
    if (!is_discrete()) return u;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto j = std::min(static_cast<std::size_t>(it - cdf_.begin()), support_.size() - 1);
    return support_[j];
  }

  // F(x) for continuous kinds.
  double quantile_transform(double x) const {
    require(is_continuous(), ErrorCode::kNotContinuous,
            "quantile transform requires a continuous distribution");
    return std::clamp(x, 0.0, 1.0);
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.kind_ == b.kind_ && a.support_ == b.support_ && a.log_probs_ == b.log_probs_;
  }

 private:
  explicit Distribution(DistributionKind kind) : kind_(kind) {}

  void precompute() {
    const std::size_t n = support_.size();
    std::vector<double> lower(n + 1, kNegInf);  // log P[X < v_j]
    for (std::size_t j = 0; j < n; ++j) lower[j + 1] = log_add(lower[j], log_probs_[j]);
    std::vector<double> upper(n + 1, kNegInf);  // log P[X >= v_j]
    for (std::size_t j = n; j-- > 0;) upper[j] = log_add(upper[j + 1], log_probs_[j]);
    log_surv_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      // The complement is more accurate while the lower tail is small.
      log_surv_[j] = lower[j] < -0.6931471805599453 ? log1mexp(lower[j]) : upper[j];
    }
    cdf_.resize(n);
    for (std::size_t j = 0; j < n; ++j) cdf_[j] = std::exp(lower[j + 1]);
    cdf_.back() = 1.0;
  }

  DistributionKind kind_;
  std::vector<double> support_;
  std::vector<double> log_probs_;
  std::vector<double> log_surv_;
  std::vector<double> cdf_;
};

inline Distribution make_discrete(std::span<const Atom> atoms) {
  std::vector<LogAtom> log_atoms;
  log_atoms.reserve(atoms.size());
  for (const auto& a : atoms) {
    require(a.prob > 0.0 && a.prob <= 1.0 + kNormalizationTolerance, ErrorCode::kOutOfRange,
            "atom probability " + std::to_string(a.prob) + " outside (0, 1]");
    log_atoms.push_back({a.value, std::log(a.prob)});
  }
  return Distribution::from_log_atoms(std::move(log_atoms));
}

inline Distribution make_discrete(std::initializer_list<Atom> atoms) {
  return make_discrete(std::span<const Atom>(atoms.begin(), atoms.size()));
}

// Equal-weight average of discrete laws, merged atom by atom.
inline Distribution average(std::span<const Distribution> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "cannot average zero distributions");
  const double log_w = -std::log(static_cast<double>(parts.size()));
  std::vector<LogAtom> atoms;
  for (const auto& d : parts) {
    require(d.is_discrete(), ErrorCode::kContinuousArm, "average is defined for discrete laws");
    for (std::size_t j = 0; j < d.size(); ++j)
      atoms.push_back({d.support()[j], d.log_probs()[j] + log_w});
  }
  return Distribution::from_log_atoms(std::move(atoms));
}

// Same support, probabilities within `tol`.
inline bool approx_equal(const Distribution& a, const Distribution& b, double tol) {
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a.support()[j] != b.support()[j]) return false;
    if (std::abs(a.prob(j) - b.prob(j)) > tol) return false;
  }
  return true;
}

// P(F(min{x_1..x_T}) <= alpha) = 1 - (1 - alpha)^T for continuous F.
inline double extreme_quantile_prob(double alpha, std::uint64_t draws) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kOutOfRange, "alpha outside [0, 1]");
  require(draws >= 1, ErrorCode::kInvalidArgument, "need at least one draw");
  return -std::expm1(static_cast<double>(draws) * std::log1p(-alpha));
}

/// An ordered collection of arms.
struct ArmTuple {
  std::vector<Distribution> arms;

  std::size_t size() const { return arms.size(); }
  const Distribution& operator[](std::size_t k) const { return arms[k]; }

  bool all_discrete() const {
    return std::all_of(arms.begin(), arms.end(), [](const auto& d) { return d.is_discrete(); });
  }

  // Sorted union of the arms' supports (discrete arms only).
  std::vector<double> joint_support() const {
    std::vector<double> out;
    for (const auto& d : arms) out.insert(out.end(), d.support().begin(), d.support().end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Smallest value any arm can produce; a run that reaches it cannot improve.
  double floor_value() const {
    double lo = 1.0;
    for (const auto& d : arms) lo = std::min(lo, d.min_value());
    return lo;
  }
};

}  // namespace xbandit
