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
#include <limits>
#include <span>

namespace xbandit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow or underflow.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// log(1 - exp(x)) for x <= 0. Switches branches at -log 2 (Maechler's rule).
inline double log1mexp(double x) {
  if (x >= 0.0) return x == 0.0 ? kNegInf : std::numeric_limits<double>::quiet_NaN();
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  return a + log1mexp(b - a);
}

// log(-log1p(-x)) for x in (0, 1), accurate when x is far below machine
// epsilon and given only as log x.
inline double log_neg_log1m(double log_x) {
  if (log_x < -36.0) {
    // -log(1 - x) = x (1 + x/2 + ...)
    return log_x + std::log1p(0.5 * std::exp(log_x));
  }
  return std::log(-std::log1p(-std::exp(log_x)));
}

// Neumaier-compensated accumulator; summation order stays the caller's.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace xbandit
