// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Command bodies behind the stablesketch tool. Each returns its output as a
// string so callers decide where it goes.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stablesketch/error.hpp"
#include "stablesketch/io.hpp"
#include "stablesketch/lestimator.hpp"
#include "stablesketch/projection.hpp"
#include "stablesketch/simulation.hpp"
#include "stablesketch/stable_numerics.hpp"
#include "stablesketch/stats.hpp"

namespace stablesketch::commands {

enum class trim_mode { automatic, on, off };

inline trim_mode parse_trim(std::string_view s) {
  if (s == "auto") return trim_mode::automatic;
  if (s == "on" || s == "1" || s == "true") return trim_mode::on;
  if (s == "off" || s == "0" || s == "false") return trim_mode::off;
  throw error(error_category::invalid_argument, "trim must be one of on, off, auto; got '" + std::string(s) + "'");
}

inline bool resolve_trim(trim_mode mode, double alpha) {
  switch (mode) {
    case trim_mode::on: return true;
    case trim_mode::off: return false;
    case trim_mode::automatic: break;
  }
  return default_trim(alpha);
}

/// "start:stop:step" (inclusive of stop up to rounding) or a single value.
/// Grid points are rounded to 12 decimals so 0.1 steps print as written.
inline std::vector<double> parse_alpha_grid(std::string_view spec) {
  const auto parts = io::split(spec, ':');
  auto number = [&](std::string_view s) {
    double v = 0.0;
    if (!io::parse_double(s, v) || !std::isfinite(v)) {
      throw error(error_category::invalid_argument, "malformed alpha grid '" + std::string(spec) + "'");
    }
    return v;
  };
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) {
    throw error(error_category::invalid_argument, "alpha grid must be start:stop:step, got '" + std::string(spec) + "'");
  }
  const double start = number(parts[0]);
  const double stop = number(parts[1]);
  const double step = number(parts[2]);
  require(step > 0.0, "alpha grid step must be positive");
  require(stop >= start, "alpha grid stop must not be below start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  require(n <= 100000, "alpha grid has too many points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return grid;
}

/// "i:j[,i:j...]" with 0-based row indices.
inline std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(std::string_view spec) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto item : io::split(spec, ',')) {
    const auto ij = io::split(item, ':');
    std::size_t i = 0;
    std::size_t j = 0;
    if (ij.size() != 2 || !io::parse_integer(ij[0], i) || !io::parse_integer(ij[1], j)) {
      throw error(error_category::invalid_argument, "malformed pair '" + std::string(item) + "', expected i:j");
    }
    out.emplace_back(i, j);
  }
  require(!out.empty(), "pair list is empty");
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  }
  return out;
}

// ---------------------------------------------------------------------------

inline std::string table_text(double alpha, std::size_t k, trim_mode trim, const QuadratureConfig& cfg = {}) {
  return io::format_table(build_weight_table(alpha, k, resolve_trim(trim, alpha), cfg));
}

/// CSV alpha,I_mu,BC.
inline std::string fisher_csv(const std::vector<double>& grid, const QuadratureConfig& cfg = {}) {
  for (double a : grid) validate_table_alpha(a);
  std::string out = "alpha,I_mu,BC\n";
  for (double a : grid) {
    const double I = fisher_information_mu(a, cfg);
    const double bc = bias_constant(a, I, cfg);
    out += io::format_double(a) + "," + io::format_double(I) + "," + io::format_double(bc) + "\n";
  }
  return out;
}

/// CSV alpha,k,mse_theta,mse_gamma,crlb_theta,crlb_gamma.
inline std::string simulate_csv(const std::vector<double>& grid, std::size_t k, std::size_t reps, std::uint64_t seed,
                                trim_mode trim, const QuadratureConfig& cfg = {}) {
  for (double a : grid) validate_table_alpha(a);
  require(k >= 2, "k must be at least 2");
  require(reps >= 2, "at least two replicates are required");
  std::string out = "alpha,k,mse_theta,mse_gamma,crlb_theta,crlb_gamma\n";
  for (double a : grid) {
    const WeightTable t = build_weight_table(a, k, resolve_trim(trim, a), cfg);
    const MseSummary s = simulate_mse(t, reps, seed);
    out += io::format_double(a) + "," + std::to_string(k) + "," + io::format_double(s.mse_theta) + "," +
           io::format_double(s.mse_gamma) + "," + io::format_double(s.crlb_theta) + "," +
           io::format_double(s.crlb_gamma) + "\n";
  }
  return out;
}

inline std::string sketch_text(const DataMatrix& data, double alpha, std::size_t k, std::uint64_t seed,
                               unsigned threads = 1) {
  return io::format_sketch(sketch(data, ProjectionSpec{alpha, k, seed, data.cols()}, threads));
}

/// CSV i,j,theta_hat,gamma_hat,se; degenerate pairs as i,j,DEGENERATE.
inline std::string estimate_csv(const SketchMatrix& sk, const WeightTable& table,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  check_compatible(sk, table);
  const std::size_t n = sk.values.rows();
  for (const auto& [i, j] : pairs) {
    if (i >= n || j >= n) {
      throw error(error_category::invalid_argument, "pair " + std::to_string(i) + ":" + std::to_string(j) +
                                                        " is out of range for " + std::to_string(n) + " rows");
    }
    require(i != j, "pair " + std::to_string(i) + ":" + std::to_string(j) + " names the same row twice");
  }
  std::string out = "i,j,theta_hat,gamma_hat,se\n";
  for (const auto& [i, j] : pairs) {
    const std::string prefix = std::to_string(i) + "," + std::to_string(j) + ",";
    try {
      const DistanceEstimate e = estimate_pair(sk, i, j, table);
      out += prefix + io::format_double(e.theta_hat) + "," + io::format_double(e.gamma_hat) + "," +
             io::format_double(e.se) + "\n";
    } catch (const degenerate_coordinate&) {
      out += prefix + "DEGENERATE\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// validate

struct SuiteOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::string outcome_line(const SuiteOutcome& s) {
  return std::string(s.passed ? "PASS" : "FAIL") + " " + s.name + ": " + s.detail;
}

/// alpha in {1, 2}: density and CDF against Cauchy / Gaussian closed forms,
/// 1000 points on [-20, 20], tolerance 1e-6.
inline SuiteOutcome closed_form_suite(const QuadratureConfig& cfg = {}) {
  constexpr int n = 1000;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -20.0 + 40.0 * i / (n - 1);
    const double cauchy_f = 1.0 / (std::numbers::pi * (1.0 + x * x));
    const double cauchy_F = 0.5 + std::atan(x) / std::numbers::pi;
    const double gauss_f = std::exp(-x * x / 4.0) / (2.0 * std::sqrt(std::numbers::pi));
    const double gauss_F = 0.5 * std::erfc(-x / 2.0);
    worst = std::max({worst, std::abs(density(x, {1.0, 1.0}, cfg) - cauchy_f),
                      std::abs(cdf(x, {1.0, 1.0}, cfg) - cauchy_F), std::abs(density(x, {2.0, 1.0}, cfg) - gauss_f),
                      std::abs(cdf(x, {2.0, 1.0}, cfg) - gauss_F)});
  }
  return {"closed-form", worst <= 1e-6, "max abs error " + io::format_double(worst) + " (tol 1e-6)"};
}

/// l'' against -sech^2(z) at alpha = 1 on [-5, 5] and -e^{2z} at alpha = 2 on
/// [-5, 0.5], 201 points each, tolerance 1e-3.
inline SuiteOutcome finite_difference_suite(const QuadratureConfig& cfg = {}) {
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double z1 = -5.0 + 10.0 * i / 200.0;
    const double c = std::cosh(z1);
    worst = std::max(worst, std::abs(log_f0_second_derivative(z1, 1.0, cfg) + 1.0 / (c * c)));
    const double z2 = -5.0 + 5.5 * i / 200.0;
    worst = std::max(worst, std::abs(log_f0_second_derivative(z2, 2.0, cfg) + std::exp(2.0 * z2)));
  }
  return {"finite-difference", worst <= 1e-3, "max abs error " + io::format_double(worst) + " (tol 1e-3)"};
}

struct KsResult {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double statistic = 0.0;
  double critical = 0.0;
  bool passed() const { return statistic < critical; }
};

inline KsResult sampler_ks(double alpha, std::size_t n, std::uint64_t seed, const QuadratureConfig& cfg = {}) {
  const StableParams p{alpha, 1.0};
  const double d = stats::ks_statistic(sample(p, n, seed), [&](double x) { return cdf(x, p, cfg); });
  return {alpha, seed, d, stats::ks_critical_1pct(n)};
}

/// Two-sided KS at 1%, n = 10^4, alpha in {0.2, 0.5, 1, 1.5, 2}.
inline SuiteOutcome sampler_suite(const std::vector<std::uint64_t>& seeds, const QuadratureConfig& cfg = {}) {
  constexpr std::size_t n = 10000;
  bool ok = true;
  std::string detail;
  for (double a : {0.2, 0.5, 1.0, 1.5, 2.0}) {
    for (auto s : seeds) {
      const KsResult r = sampler_ks(a, n, s, cfg);
      ok = ok && r.passed();
      if (!detail.empty()) detail += " ";
      detail += "a=" + io::format_double(a) + "/s=" + std::to_string(s) + ":D=" + io::format_double(r.statistic);
    }
  }
  return {"sampler-ks", ok, detail + " (crit " + io::format_double(stats::ks_critical_1pct(n)) + ")"};
}

/// CSV alpha,z,ell2 on the given alpha grid and z in [-5, 5] step 0.1.
inline std::string ell2_csv(const std::vector<double>& grid, const QuadratureConfig& cfg = {}) {
  for (double a : grid) validate_alpha(a);
  std::string out = "alpha,z,ell2\n";
  for (double a : grid) {
    for (int i = -50; i <= 50; ++i) {
      const double z = i / 10.0;
      out += io::format_double(a) + "," + io::format_double(z) + "," +
             io::format_double(log_f0_second_derivative(z, a, cfg)) + "\n";
    }
  }
  return out;
}

}  // namespace stablesketch::commands
