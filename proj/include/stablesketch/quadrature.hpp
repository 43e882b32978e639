// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Globally adaptive Gauss-Kronrod (10/21 point) quadrature in the style of
// QUADPACK's QAG: the panel with the largest error estimate is bisected until
// the summed error meets the tolerance or the subdivision budget runs out.
// Node and weight tables come from Boost.Math.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace stablesketch::quadrature {

struct result {
  double value = 0.0;
  double error = 0.0;
  std::size_t subdivisions = 0;
  bool converged = false;
};

namespace detail {

struct panel {
  double a;
  double b;
  double value;
  double error;
  double l1;
};

inline bool operator<(const panel& lhs, const panel& rhs) { return lhs.error < rhs.error; }

// One 21-point Kronrod panel with the embedded 10-point Gauss rule; error
// estimate scaled as in QUADPACK's qk21.
template <class F>
panel kronrod21(F& f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using gauss = boost::math::quadrature::gauss<double, 10>;
  static const auto xk = kronrod::abscissa();
  static const auto wk = kronrod::weights();
  static const auto wg = gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv1[10];
  double fv2[10];
  const double fc = f(center);
  double res_k = fc * wk[0];
  double res_g = 0.0;
  double res_abs = std::abs(res_k);
  for (std::size_t j = 1; j < xk.size(); ++j) {
    const double dx = half * xk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j - 1] = f1;
    fv2[j - 1] = f2;
    res_k += wk[j] * (f1 + f2);
    res_abs += wk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) res_g += wg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * res_k;
  double res_asc = wk[0] * std::abs(fc - mean);
  for (std::size_t j = 1; j < xk.size(); ++j) {
    res_asc += wk[j] * (std::abs(fv1[j - 1] - mean) + std::abs(fv2[j - 1] - mean));
  }

  const double ah = std::abs(half);
  double err = std::abs((res_k - res_g) * half);
  res_asc *= ah;
  res_abs *= ah;
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * res_abs, err);
  }
  return panel{a, b, res_k * half, err, res_abs};
}

}  // namespace detail

/// Integrates f over the consecutive intervals delimited by `breaks`
/// (at least two increasing points). Convergence means the total error
/// estimate is within max(abs_tol, rel_tol * |value|); a result that stops at
/// the roundoff floor of the panel sums is also accepted.
template <class F>
result integrate(F&& f, std::span<const double> breaks, double rel_tol,
                 std::size_t max_subdivisions, double abs_tol = 0.0) {
  std::vector<detail::panel> heap;
  heap.reserve(max_subdivisions + breaks.size() + 2);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) heap.push_back(detail::kronrod21(f, breaks[i], breaks[i + 1]));
  }
  std::make_heap(heap.begin(), heap.end());

  auto totals = [&heap](double& value, double& error, double& l1) {
    value = error = l1 = 0.0;
    for (const auto& p : heap) {
      value += p.value;
      error += p.error;
      l1 += p.l1;
    }
  };

  result out;
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  totals(value, error, l1);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto good_enough = [&] {
    return error <= std::max(abs_tol, rel_tol * std::abs(value)) || error <= 100.0 * eps * l1;
  };

  while (!good_enough() && out.subdivisions < max_subdivisions && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end());
    const detail::panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel no longer splittable in double precision.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    heap.push_back(detail::kronrod21(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(detail::kronrod21(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end());
    ++out.subdivisions;
    // Recompute sums from scratch; incremental updates drift for long runs.
    totals(value, error, l1);
  }
  out.value = value;
  out.error = error;
  out.converged = good_enough();
  return out;
}

template <class F>
result integrate(F&& f, double a, double b, double rel_tol, std::size_t max_subdivisions,
                 double abs_tol = 0.0) {
  const double breaks[2] = {a, b};
  return integrate(f, std::span<const double>(breaks, 2), rel_tol, max_subdivisions, abs_tol);
}

}  // namespace stablesketch::quadrature
