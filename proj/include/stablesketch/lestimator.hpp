// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// L-estimation of the log-scale mu = log gamma of a symmetric stable sample.
//
// With y_i = log|x_i| = mu + z_i and z_i ~ f0, the efficient L-estimator puts
// weight proportional to l''(F0^{-1}(i / (k + 1))) on the i-th order statistic,
// l = log f0. The weights depend on (alpha, k) only and are tabulated once.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stablesketch/error.hpp"
#include "stablesketch/quadrature.hpp"
#include "stablesketch/stable_numerics.hpp"

namespace stablesketch {

struct WeightTable {
  double alpha = 0.0;
  std::size_t k = 0;
  std::vector<double> q;  // F0^{-1}(i / (k + 1)), i = 1..k
  std::vector<double> w;  // normalized weights, sum 1
  double S = 0.0;         // sum of l''(q_j) over the retained ranks
  double I_mu = 0.0;
  double BC = 0.0;
  bool trimmed = false;
};

/// Log absolute values of projected differences; sorted on demand.
struct LocationSample {
  std::vector<double> y;
  bool sorted = false;
};

struct EstimateResult {
  double mu_hat = 0.0;
  double gamma_hat = 0.0;
  double theta_hat = 0.0;
  double se_mu = 0.0;
};

/// Trimming is on by default only above this alpha, where the weight
/// function starts to oscillate in the upper tail.
inline constexpr double kTrimDefaultAbove = 1.8;

inline bool default_trim(double alpha) { return alpha > kTrimDefaultAbove; }

/// Density floor that bounds the integration range over z.
inline constexpr double kSupportCutoff = 1e-14;

/// [lo, hi] outside of which f0 < cutoff.
inline std::pair<double, double> f0_support(double alpha, const QuadratureConfig& cfg = {},
                                            double cutoff = kSupportCutoff) {
  validate_alpha(alpha);
  const double log_cut = std::log(cutoff);
  // Start where f0 is known to be near its bulk; widen until below the cutoff.
  double lo = -1.0;
  while (f0_log_density(lo, alpha, cfg) >= log_cut) lo -= 1.0;
  double hi = 1.0;
  const double step = std::max(1.0, 1.0 / alpha);
  while (f0_log_density(hi, alpha, cfg) >= log_cut) hi += step;
  return {lo, hi};
}

namespace detail {

inline std::vector<double> unit_breaks(double lo, double hi) {
  std::vector<double> breaks;
  const double first = std::floor(lo);
  for (double b = first; b < hi; b += 1.0) breaks.push_back(b);
  breaks.push_back(std::ceil(hi));
  return breaks;
}

template <class F>
double integrate_over_f0(F&& integrand, double alpha, const QuadratureConfig& cfg, const char* what,
                         double abs_tol = 0.0) {
  const auto [lo, hi] = f0_support(alpha, cfg);
  const auto breaks = unit_breaks(lo, hi);
  const auto r = quadrature::integrate(integrand, breaks, cfg.relative_tolerance, cfg.max_subdivisions, abs_tol);
  if (!r.converged) {
    std::ostringstream msg;
    msg << what << " quadrature did not converge for alpha=" << alpha << " (error estimate " << r.error
        << ", value " << r.value << ")";
    throw numerical_failure(0.0, alpha, msg.str());
  }
  return r.value;
}

}  // namespace detail

/// I_mu = int l'(z)^2 f0(z) dz with l' by central differences.
inline double fisher_information_mu(double alpha, const QuadratureConfig& cfg = {}) {
  validate_table_alpha(alpha);
  validate(cfg);
  auto integrand = [&](double z) {
    const auto s = log_f0_on_stencil(z, alpha, cfg);
    const double d1 = 1.0 + s.first_derivative();
    return d1 * d1 * std::exp(std::numbers::ln2 + z + s.center);
  };
  return detail::integrate_over_f0(integrand, alpha, cfg, "Fisher information");
}

/// BC = -(1 / I_mu) int z l''(z) f0(z) dz, the asymptotic bias of the raw
/// L-estimator sum_i w_i y_(i) with weights -l''(q_i) / (k I_mu).
inline double bias_constant(double alpha, double I_mu, const QuadratureConfig& cfg = {}) {
  validate_table_alpha(alpha);
  validate(cfg);
  require(I_mu > 0.0, "Fisher information must be positive");
  auto integrand = [&](double z) {
    const auto s = log_f0_on_stencil(z, alpha, cfg);
    return z * s.second_derivative() * std::exp(std::numbers::ln2 + z + s.center);
  };
  // The integral vanishes at alpha = 1, so its tolerance is set on the scale of I_mu.
  const double abs_tol = cfg.relative_tolerance * I_mu;
  return -detail::integrate_over_f0(integrand, alpha, cfg, "bias constant", abs_tol) / I_mu;
}

inline double bias_constant(double alpha, const QuadratureConfig& cfg = {}) {
  return bias_constant(alpha, fisher_information_mu(alpha, cfg), cfg);
}

/// Weights w_i = l''(q_i) / sum_j l''(q_j) at q_i = F0^{-1}(i / (k + 1)).
/// With trim set, negative weights are zeroed and the rest renormalized.
inline WeightTable build_weight_table(double alpha, std::size_t k, bool trim, const QuadratureConfig& cfg = {}) {
  validate_table_alpha(alpha);
  validate(cfg);
  require(k >= 2, "k must be at least 2");

  WeightTable t;
  t.alpha = alpha;
  t.k = k;
  t.q.resize(k);
  std::vector<double> d2(k);
  const double denom = static_cast<double>(k) + 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double u = static_cast<double>(i + 1) / denom;
    t.q[i] = f0_quantile(u, alpha, cfg);
    d2[i] = log_f0_second_derivative(t.q[i], alpha, cfg);
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (!(t.q[i] > t.q[i - 1])) {
      throw error(error_category::numerical_failure,
                  "quantile grid is not strictly increasing at rank " + std::to_string(i + 1));
    }
  }

  if (trim) {
    // Negative weights correspond to l'' > 0 (S is negative).
    for (double& v : d2) v = std::min(v, 0.0);
    t.trimmed = true;
  }
  double S = 0.0;
  for (double v : d2) S += v;
  if (!(S < 0.0)) {
    throw error(error_category::numerical_failure, "sum of l'' over the quantile grid is not negative");
  }
  t.S = S;
  t.w.resize(k);
  for (std::size_t i = 0; i < k; ++i) t.w[i] = d2[i] == 0.0 ? 0.0 : d2[i] / S;

  t.I_mu = fisher_information_mu(alpha, cfg);
  t.BC = bias_constant(alpha, t.I_mu, cfg);
  return t;
}

inline WeightTable build_weight_table(double alpha, std::size_t k, const QuadratureConfig& cfg = {}) {
  return build_weight_table(alpha, k, default_trim(alpha), cfg);
}

namespace detail {

inline void check_sample(const LocationSample& sample, const WeightTable& table) {
  if (sample.y.size() != table.k) {
    throw error(error_category::mismatch, "sample length " + std::to_string(sample.y.size()) +
                                              " does not match table k=" + std::to_string(table.k));
  }
  for (std::size_t i = 0; i < sample.y.size(); ++i) {
    if (!std::isfinite(sample.y[i])) {
      throw degenerate_coordinate(i, "log-absolute value at index " + std::to_string(i) +
                                         " is not finite (zero projected difference)");
    }
  }
}

// Order-preserving map from double to unsigned key (no NaN).
inline std::uint64_t sort_key(double v) {
  const auto b = std::bit_cast<std::uint64_t>(v);
  return (b >> 63) != 0 ? ~b : b | (std::uint64_t{1} << 63);
}

/// Stable LSD radix sort, 8-bit digits; passes with a single occupied bucket are skipped.
inline void radix_sort(std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 2) return;
  std::vector<std::uint64_t> keys(n);
  std::vector<std::uint64_t> tmp(n);
  std::array<std::array<std::size_t, 256>, 8> hist{};
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = sort_key(y[i]);
    for (unsigned d = 0; d < 8; ++d) ++hist[d][(keys[i] >> (8 * d)) & 0xff];
  }
  for (unsigned d = 0; d < 8; ++d) {
    auto& h = hist[d];
    if (h[(keys[0] >> (8 * d)) & 0xff] == n) continue;
    std::size_t sum = 0;
    for (auto& c : h) {
      const std::size_t t = c;
      c = sum;
      sum += t;
    }
    for (std::size_t i = 0; i < n; ++i) tmp[h[(keys[i] >> (8 * d)) & 0xff]++] = keys[i];
    keys.swap(tmp);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t k = keys[i];
    y[i] = std::bit_cast<double>((k >> 63) != 0 ? k & ~(std::uint64_t{1} << 63) : ~k);
  }
}

inline std::vector<double> order_statistics(const LocationSample& sample) {
  std::vector<double> y = sample.y;
  if (!sample.sorted) radix_sort(y);
  return y;
}

}  // namespace detail

/// Builds y_i = log|x_i|; a zero x_i is a degenerate coordinate.
inline LocationSample make_location_sample(const std::vector<double>& x) {
  LocationSample s;
  s.y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      throw degenerate_coordinate(i, "projected difference at index " + std::to_string(i) + " is exactly zero");
    }
    s.y[i] = std::log(std::abs(x[i]));
  }
  return s;
}

/// Quantile-anchored estimator
///   mu_hat    = sum_i w_i (y_(i) - q_i)
///   gamma_hat = exp(mu_hat) (1 + 1 / (2 S))
///   theta_hat = exp(alpha mu_hat) (1 - alpha^2 / (2 k I_mu))
/// The last two factors remove the second-order bias of exponentiation.
inline EstimateResult estimate(const LocationSample& sample, const WeightTable& table) {
  detail::check_sample(sample, table);
  const std::vector<double> y = detail::order_statistics(sample);
  double mu = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) mu += table.w[i] * (y[i] - table.q[i]);

  const double k = static_cast<double>(table.k);
  EstimateResult r;
  r.mu_hat = mu;
  r.gamma_hat = std::exp(mu) * (1.0 + 1.0 / (2.0 * table.S));
  r.theta_hat = std::exp(table.alpha * mu) * (1.0 - table.alpha * table.alpha / (2.0 * k * table.I_mu));
  r.se_mu = 1.0 / std::sqrt(k * table.I_mu);
  return r;
}

inline double estimate_theta_direct(const LocationSample& sample, const WeightTable& table) {
  return estimate(sample, table).theta_hat;
}

/// Unnormalized form: -(1 / (k I_mu)) sum_i l''(q_i) y_(i) - BC. Not scale
/// equivariant; kept to check the bias constant against simulation.
inline double estimate_mu_raw(const LocationSample& sample, const WeightTable& table) {
  detail::check_sample(sample, table);
  const std::vector<double> y = detail::order_statistics(sample);
  const double scale = -table.S / (static_cast<double>(table.k) * table.I_mu);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += table.w[i] * y[i];
  return scale * acc - table.BC;
}

}  // namespace stablesketch
