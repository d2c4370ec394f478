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
#include <span>
#include <vector>

namespace xbandit {

// One-sample two-sided Kolmogorov-Smirnov statistic sup |F_n - F|.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double f = cdf(samples[j]);
    const auto dj = static_cast<double>(j);
    d = std::max({d, (dj + 1.0) / n - f, f - dj / n});
  }
  return d;
}

// Asymptotic critical value of the KS statistic at level 0.01.
inline double ks_critical_01(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

struct MeanEstimate {
  double mean;
  double std_error;
};

inline MeanEstimate mean_and_se(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

// Standard error of a sample proportion.
inline double proportion_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace xbandit
