// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Goodness-of-fit helpers shared by the validation command and the tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace stablesketch::stats {

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic critical value of the KS statistic at level 1%: K^{-1}(0.99) / sqrt(n),
/// with the small-sample correction of Stephens (1970).
inline double ks_critical_1pct(std::size_t n) {
  constexpr double k99 = 1.6276236115189;  // Kolmogorov distribution 0.99 quantile
  const double rn = std::sqrt(static_cast<double>(n));
  return k99 / (rn + 0.12 + 0.11 / rn);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace stablesketch::stats
