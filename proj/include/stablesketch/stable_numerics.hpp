// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Symmetric strictly stable law with characteristic function
//   E exp(itX) = exp(-theta |t|^alpha),   0 < alpha <= 2, theta > 0,
// and the law of log|X| used for L-estimation of the log-scale.
//
// Evaluation routes for the standard law (theta = 1) at x >= 0:
//   alpha == 1     Cauchy closed form
//   alpha == 2     Gaussian closed form (variance 2)
//   small x        power series about the origin, when it converges to full precision
//   large x        tail expansion, when its terms fall below double precision
//   otherwise      Zolotarev's single integral (Nolan's form) with adaptive quadrature,
//                  split at the peak of the integrand.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "stablesketch/error.hpp"
#include "stablesketch/philox.hpp"
#include "stablesketch/quadrature.hpp"

namespace stablesketch {

/// Index alpha and scale theta of exp(-theta |t|^alpha). gamma = theta^(1/alpha).
struct StableParams {
  double alpha = 1.0;
  double theta = 1.0;

  double gamma() const { return std::pow(theta, 1.0 / alpha); }
};

struct QuadratureConfig {
  double relative_tolerance = 1e-9;
  std::size_t max_subdivisions = 200;
  double fd_grid_width = 0.01;  // h of the central difference stencils
};

/// Smallest alpha for which the L-estimation constants are supported.
inline constexpr double kMinTableAlpha = 0.14;

inline void validate(const StableParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) {
    throw error(error_category::invalid_argument, "alpha must lie in (0, 2], got " + std::to_string(p.alpha));
  }
  if (!(p.theta > 0.0 && std::isfinite(p.theta))) {
    throw error(error_category::invalid_argument, "theta must be positive and finite, got " + std::to_string(p.theta));
  }
}

inline void validate(const QuadratureConfig& cfg) {
  require(cfg.relative_tolerance > 0.0, "relative_tolerance must be positive");
  require(cfg.fd_grid_width > 0.0, "fd_grid_width must be positive");
  require(cfg.max_subdivisions > 0, "max_subdivisions must be positive");
}

inline void validate_alpha(double alpha) { validate(StableParams{alpha, 1.0}); }

inline void validate_table_alpha(double alpha) {
  if (!(alpha >= kMinTableAlpha && alpha <= 2.0)) {
    throw error(error_category::invalid_argument,
                "alpha must lie in [0.14, 2] for table-backed estimation, got " + std::to_string(alpha));
  }
}

namespace detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
// Within this distance of 1 the law is treated as Cauchy; the density moves by O(|alpha - 1|).
inline constexpr double kCauchyBand = 1e-10;
inline constexpr double kNearCauchyBand = 1e-3;

// Open interval whose endpoints 1 -/+ kNearCauchyBand are themselves outside it.
inline bool is_near_cauchy(double alpha) {
  return alpha > 1.0 - kNearCauchyBand && alpha < 1.0 + kNearCauchyBand;
}

inline bool is_cauchy(double alpha) { return std::abs(alpha - 1.0) <= kCauchyBand; }
inline bool is_gaussian(double alpha) { return alpha == 2.0; }

/// f(0) of the standard law.
inline double density_at_zero(double alpha) { return std::tgamma(1.0 + 1.0 / alpha) / kPi; }

/// Leading tail coefficient c in f(x) ~ c x^(-1-alpha); zero at alpha = 2.
inline double tail_coefficient(double alpha) {
  return std::tgamma(alpha + 1.0) * std::sin(kPi * alpha / 2.0) / kPi;
}

// ---------------------------------------------------------------------------
// Series expansions. Each returns {value, ok}; ok is false when the terms do
// not shrink below double precision without heavy cancellation.

struct series_value {
  double value;
  bool ok;
};

inline constexpr int kMaxSeriesTerms = 120;
inline constexpr double kSeriesTol = 1e-17;

// sum_{n>=0} (-1)^n Gamma((2n+1)/alpha) / (2n + shift)! x^(2n + shift - ... )
// shift = 0: density, x^(2n); shift = 1: central mass, x^(2n+1).
inline series_value origin_series(double x, double alpha, int shift) {
  const double log_x = std::log(x);
  double sum = 0.0;
  double max_term = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double power = 2.0 * n + shift;
    const double log_mag = std::lgamma((2.0 * n + 1.0) / alpha) - std::lgamma(power + 1.0) + power * log_x;
    const double mag = std::exp(log_mag);
    if (n > 0 && mag > prev) return {0.0, false};
    sum += (n % 2 == 0) ? mag : -mag;
    max_term = std::max(max_term, mag);
    if (n > 0 && mag <= kSeriesTol * std::abs(sum)) {
      if (std::abs(sum) < 1e-3 * max_term) return {0.0, false};
      return {sum / (kPi * alpha), true};
    }
    prev = mag;
  }
  return {0.0, false};
}

// Tail expansion. shift = 1: density, coefficient Gamma(n alpha + 1) x^-(n alpha + 1);
// shift = 0: survival, coefficient Gamma(n alpha) x^-(n alpha).
inline series_value tail_series(double x, double alpha, int shift) {
  const double log_x = std::log(x);
  double sum = 0.0;
  double max_term = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= kMaxSeriesTerms; ++n) {
    const double na = n * alpha;
    const double log_mag = std::lgamma(na + shift) - std::lgamma(n + 1.0) - (na + shift) * log_x;
    const double mag = std::exp(log_mag);
    if (n > 1 && mag > prev) return {0.0, false};
    const double term = mag * std::sin(n * kPi * alpha / 2.0);
    sum += (n % 2 == 1) ? term : -term;
    max_term = std::max(max_term, std::abs(term));
    if (n > 1 && mag <= kSeriesTol * std::abs(sum)) {
      if (std::abs(sum) < 1e-3 * max_term) return {0.0, false};
      return {sum / kPi, true};
    }
    prev = mag;
  }
  return {0.0, false};
}

// ---------------------------------------------------------------------------
// Zolotarev integral. For x > 0, alpha not in {1, 2}, with e = alpha / (alpha - 1):
//   g(phi) = x^e (cos phi / sin(alpha phi))^e cos((alpha - 1) phi) / cos phi,  phi in (0, pi/2)
//   f(x)   = alpha / (pi |alpha - 1| x) * int g exp(-g) dphi
//   (1/pi) int exp(-g)        = P(0 < X < x) for alpha < 1, P(X > x) for alpha > 1
//   (1/pi) int (1 - exp(-g))  = the complementary mass.
// g is monotone in phi, so the integrands change character at the unique g = 1.

enum class kernel_integrand { density, exp_neg_g, one_minus_exp_neg_g };

struct zolotarev_kernel {
  double alpha;
  double e;
  double log_x;

  // phi and psi = pi/2 - phi are passed separately so that both ends of the
  // interval keep full relative precision.
  double log_g(double phi, double psi) const {
    return e * (log_x - std::log(std::sin(alpha * phi))) + (e - 1.0) * std::log(std::sin(psi)) +
           std::log(std::cos((alpha - 1.0) * phi));
  }

  static double integrand(double lg, kernel_integrand which) {
    switch (which) {
      case kernel_integrand::density: return std::exp(lg - std::exp(lg));
      case kernel_integrand::exp_neg_g: return std::exp(-std::exp(lg));
      case kernel_integrand::one_minus_exp_neg_g: return -std::expm1(-std::exp(lg));
    }
    return 0.0;
  }
};

// Breakpoints around a peak at t in (0, quarter]: geometric on both sides so that
// polynomial decay away from the peak is resolved without deep bisection.
inline std::vector<double> peak_breaks(double t, double quarter) {
  std::vector<double> below;
  for (double b = t / 4.0; b > t * 1e-6 && below.size() < 8; b /= 4.0) below.push_back(b);
  std::vector<double> breaks = {0.0};
  breaks.insert(breaks.end(), below.rbegin(), below.rend());
  if (t > 0.0 && t < quarter) breaks.push_back(t);
  for (double b = t * 4.0; b < quarter; b *= 4.0) breaks.push_back(b);
  breaks.push_back(quarter);
  return breaks;
}

inline double zolotarev_integral(double x, double alpha, kernel_integrand which, const QuadratureConfig& cfg) {
  const zolotarev_kernel k{alpha, alpha / (alpha - 1.0), std::log(x)};
  constexpr double quarter = kPi / 4.0;
  // The two halves [0, pi/4] in phi and [0, pi/4] in psi.
  auto in_phi = [&](double t) { return k.log_g(t, kHalfPi - t); };
  auto in_psi = [&](double t) { return k.log_g(kHalfPi - t, t); };

  const double mid = in_phi(quarter);
  // log g increases with phi for alpha < 1 and decreases for alpha > 1.
  const bool increasing = alpha < 1.0;
  const bool peak_in_phi_half = increasing ? (mid > 0.0) : (mid < 0.0);

  auto locate = [&](auto&& lg) -> double {
    constexpr double t_lo = 1e-300;
    const double f_lo = lg(t_lo);
    const double f_hi = lg(quarter);
    if (!(f_lo * f_hi < 0.0)) return std::abs(f_lo) < std::abs(f_hi) ? t_lo : quarter;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(lg, t_lo, quarter, f_lo, f_hi,
                                                     boost::math::tools::eps_tolerance<double>(48), iters);
    return 0.5 * (r.first + r.second);
  };

  double peak_phi = quarter;
  double peak_psi = quarter;
  if (peak_in_phi_half) {
    peak_phi = locate(in_phi);
  } else {
    peak_psi = locate(in_psi);
  }
  const std::vector<double> phi_breaks = peak_breaks(peak_phi, quarter);
  const std::vector<double> psi_breaks = peak_breaks(peak_psi, quarter);

  auto f_phi = [&](double t) { return zolotarev_kernel::integrand(in_phi(t), which); };
  auto f_psi = [&](double t) { return zolotarev_kernel::integrand(in_psi(t), which); };
  const auto a = quadrature::integrate(f_phi, phi_breaks, cfg.relative_tolerance, cfg.max_subdivisions);
  const auto b = quadrature::integrate(f_psi, psi_breaks, cfg.relative_tolerance, cfg.max_subdivisions);
  const double total = a.value + b.value;
  const double err = a.error + b.error;
  if (!(a.converged && b.converged) && err > cfg.relative_tolerance * std::abs(total)) {
    std::ostringstream msg;
    msg << "stable integral did not converge at x=" << x << " alpha=" << alpha << " (error estimate " << err
        << ", value " << total << ")";
    throw numerical_failure(x, alpha, msg.str());
  }
  return total;
}

// ---------------------------------------------------------------------------
// Standard law (theta = 1) at x >= 0.

inline double standard_density(double x, double alpha, const QuadratureConfig& cfg) {
  x = std::abs(x);
  if (is_gaussian(alpha)) return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(kPi));
  if (is_cauchy(alpha)) return 1.0 / (kPi * (1.0 + x * x));
  if (x == 0.0) return density_at_zero(alpha);
  if (std::isinf(x)) return 0.0;
  if (is_near_cauchy(alpha)) {
    // The kernel degenerates to a spike as alpha -> 1; interpolate in alpha
    // between the Cauchy law and the edge of the band instead.
    const double edge = alpha < 1.0 ? 1.0 - kNearCauchyBand : 1.0 + kNearCauchyBand;
    const double t = (alpha - 1.0) / (edge - 1.0);
    return (1.0 - t) / (kPi * (1.0 + x * x)) + t * standard_density(x, edge, cfg);
  }
  if (const auto s = origin_series(x, alpha, 0); s.ok) return s.value;
  if (const auto s = tail_series(x, alpha, 1); s.ok) return s.value;
  const double integral = zolotarev_integral(x, alpha, kernel_integrand::density, cfg);
  return alpha / (kPi * std::abs(alpha - 1.0) * x) * integral;
}

/// log f(exp(log_x)) for the standard law, valid far beyond the range of exp.
inline double standard_log_density_at_log(double log_x, double alpha, const QuadratureConfig& cfg) {
  if (is_gaussian(alpha)) {
    // -x^2/4 - log(2 sqrt(pi)) with x^2 = exp(2 log_x)
    return -std::exp(2.0 * log_x) / 4.0 - std::log(2.0 * std::sqrt(kPi));
  }
  if (is_cauchy(alpha)) {
    if (log_x > 0.0) return -std::log(kPi) - 2.0 * log_x - std::log1p(std::exp(-2.0 * log_x));
    return -std::log(kPi) - std::log1p(std::exp(2.0 * log_x));
  }
  if (log_x < -700.0) return std::log(density_at_zero(alpha));
  // Beyond x^-alpha < 1e-19 the leading tail term is exact in double precision.
  if (alpha * log_x > 44.0) {
    if (!is_near_cauchy(alpha)) return std::log(tail_coefficient(alpha)) - (alpha + 1.0) * log_x;
    // Same interpolation as standard_density, in log space.
    const double edge = alpha < 1.0 ? 1.0 - kNearCauchyBand : 1.0 + kNearCauchyBand;
    const double t = (alpha - 1.0) / (edge - 1.0);
    const double a = std::log((1.0 - t) / kPi) - 2.0 * log_x;
    const double b = std::log(t * tail_coefficient(edge)) - (edge + 1.0) * log_x;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  }
  return std::log(standard_density(std::exp(log_x), alpha, cfg));
}

/// P(0 < X < x) for the standard law, x >= 0.
inline double standard_central_mass(double x, double alpha, const QuadratureConfig& cfg) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 0.5;
  if (is_gaussian(alpha)) return 0.5 * std::erf(x / 2.0);
  if (is_cauchy(alpha)) return std::atan(x) / kPi;
  if (is_near_cauchy(alpha)) {
    const double edge = alpha < 1.0 ? 1.0 - kNearCauchyBand : 1.0 + kNearCauchyBand;
    const double t = (alpha - 1.0) / (edge - 1.0);
    return (1.0 - t) * std::atan(x) / kPi + t * standard_central_mass(x, edge, cfg);
  }
  if (const auto s = origin_series(x, alpha, 1); s.ok) return s.value;
  if (const auto s = tail_series(x, alpha, 0); s.ok) return 0.5 - s.value;
  const auto which = alpha < 1.0 ? kernel_integrand::exp_neg_g : kernel_integrand::one_minus_exp_neg_g;
  return zolotarev_integral(x, alpha, which, cfg) / kPi;
}

/// P(X > x) for the standard law, x >= 0.
inline double standard_survival(double x, double alpha, const QuadratureConfig& cfg) {
  if (x <= 0.0) return 0.5;
  if (std::isinf(x)) return 0.0;
  if (is_gaussian(alpha)) return 0.5 * std::erfc(x / 2.0);
  if (is_cauchy(alpha)) return std::atan2(1.0, x) / kPi;
  if (is_near_cauchy(alpha)) {
    const double edge = alpha < 1.0 ? 1.0 - kNearCauchyBand : 1.0 + kNearCauchyBand;
    const double t = (alpha - 1.0) / (edge - 1.0);
    return (1.0 - t) * std::atan2(1.0, x) / kPi + t * standard_survival(x, edge, cfg);
  }
  if (const auto s = tail_series(x, alpha, 0); s.ok) return s.value;
  if (const auto s = origin_series(x, alpha, 1); s.ok) return 0.5 - s.value;
  const auto which = alpha < 1.0 ? kernel_integrand::one_minus_exp_neg_g : kernel_integrand::exp_neg_g;
  return zolotarev_integral(x, alpha, which, cfg) / kPi;
}

// Masses of log|X| on either side of z: lower = P(log|X| <= z) = 2 P(0 < X < e^z),
// upper = 2 P(X > e^z).
inline double log_abs_lower_mass(double z, double alpha, const QuadratureConfig& cfg) {
  if (z < -700.0) return 2.0 * density_at_zero(alpha) * std::exp(z);
  if (z > 700.0) return 1.0;
  return 2.0 * standard_central_mass(std::exp(z), alpha, cfg);
}

inline double log_abs_upper_mass(double z, double alpha, const QuadratureConfig& cfg) {
  if (z < -700.0) return 1.0;
  if (z > 700.0) {
    if (is_gaussian(alpha)) return 0.0;
    return 2.0 * tail_coefficient(alpha) / alpha * std::exp(-alpha * z);
  }
  return 2.0 * standard_survival(std::exp(z), alpha, cfg);
}

/// z with lower mass (upper == false) or upper mass (upper == true) equal to `mass`.
/// Bracket from tail asymptotics, expanded by doubling, then bisection.
inline double log_abs_quantile(double mass, bool upper, double alpha, const QuadratureConfig& cfg) {
  if (!(mass > 0.0 && mass <= 1.0)) {
    throw error(error_category::invalid_argument, "quantile mass must lie in (0, 1]");
  }
  // excess(z) is increasing in z and vanishes at the answer.
  auto excess = [&](double z) {
    return upper ? mass - log_abs_upper_mass(z, alpha, cfg) : log_abs_lower_mass(z, alpha, cfg) - mass;
  };

  double guess = 0.0;
  if (!upper) {
    guess = std::log(mass / (2.0 * density_at_zero(alpha)));
  } else if (is_gaussian(alpha)) {
    guess = 0.5 * std::log(4.0 * std::max(-std::log(mass), 0.1));
  } else {
    guess = std::log(2.0 * tail_coefficient(alpha) / (alpha * mass)) / alpha;
  }
  if (!std::isfinite(guess)) guess = 0.0;
  guess = std::clamp(guess, -650.0, 650.0);

  constexpr double kLimit = 700.0;
  double lo = guess - 0.5;
  double hi = guess + 0.5;
  double step = 1.0;
  while (excess(lo) > 0.0) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    if (lo < -kLimit) {
      throw error(error_category::range, "quantile bracket expansion failed below for mass " + std::to_string(mass));
    }
  }
  step = 1.0;
  while (excess(hi) < 0.0) {
    lo = hi;
    hi += step;
    step *= 2.0;
    if (hi > kLimit) {
      throw error(error_category::range, "quantile bracket expansion failed above for mass " + std::to_string(mass));
    }
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    const double ex = excess(mid);
    if (ex == 0.0) return mid;
    (ex < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scaled law f(x; alpha, theta) = gamma^-1 f(x / gamma; alpha, 1).

inline double density(double x, const StableParams& p, const QuadratureConfig& cfg = {}) {
  validate(p);
  validate(cfg);
  require(std::isfinite(x), "density argument must be finite");
  const double gamma = p.gamma();
  return detail::standard_density(std::abs(x) / gamma, p.alpha, cfg) / gamma;
}

inline double cdf(double x, const StableParams& p, const QuadratureConfig& cfg = {}) {
  validate(p);
  validate(cfg);
  require(!std::isnan(x), "cdf argument must not be NaN");
  const double s = std::abs(x) / p.gamma();
  if (x >= 0.0) return 0.5 + detail::standard_central_mass(s, p.alpha, cfg);
  return detail::standard_survival(s, p.alpha, cfg);
}

/// Inverse of cdf via the law of log|X|. Both halves invert the same tail
/// mass 2 min(u, 1 - u), so quantile(1 - u) = -quantile(u) exactly whenever
/// 1 - u is representable.
inline double quantile(double u, const StableParams& p, const QuadratureConfig& cfg = {}) {
  validate(p);
  validate(cfg);
  if (!(u > 0.0 && u < 1.0)) {
    throw error(error_category::invalid_argument, "quantile level must lie in (0, 1), got " + std::to_string(u));
  }
  if (u == 0.5) return 0.0;
  const double mass = u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
  const double x = p.gamma() * std::exp(detail::log_abs_quantile(mass, true, p.alpha, cfg));
  return u < 0.5 ? -x : x;
}

/// Central second difference of the density, f''(x) at stencil width h.
inline double density_second_derivative(double x, const StableParams& p, const QuadratureConfig& cfg = {}) {
  const double h = cfg.fd_grid_width;
  return (density(x + h, p, cfg) - 2.0 * density(x, p, cfg) + density(x - h, p, cfg)) / (h * h);
}

// ---------------------------------------------------------------------------
// Law of Z = log|X|, X standard: f0(z) = 2 e^z f(e^z; alpha, 1).

inline double f0_log_density(double z, double alpha, const QuadratureConfig& cfg = {}) {
  validate_alpha(alpha);
  return std::numbers::ln2 + z + detail::standard_log_density_at_log(z, alpha, cfg);
}

inline double f0_density(double z, double alpha, const QuadratureConfig& cfg = {}) {
  return std::exp(f0_log_density(z, alpha, cfg));
}

inline double f0_cdf(double z, double alpha, const QuadratureConfig& cfg = {}) {
  validate_alpha(alpha);
  require(!std::isnan(z), "f0_cdf argument must not be NaN");
  if (z <= 0.0 || detail::is_gaussian(alpha)) {
    const double lower = detail::log_abs_lower_mass(z, alpha, cfg);
    if (lower <= 0.5) return lower;
  }
  return 1.0 - detail::log_abs_upper_mass(z, alpha, cfg);
}

inline double f0_quantile(double u, double alpha, const QuadratureConfig& cfg = {}) {
  validate_alpha(alpha);
  if (!(u > 0.0 && u < 1.0)) {
    throw error(error_category::invalid_argument, "f0 quantile level must lie in (0, 1), got " + std::to_string(u));
  }
  if (u <= 0.5) return detail::log_abs_quantile(u, false, alpha, cfg);
  return detail::log_abs_quantile(1.0 - u, true, alpha, cfg);
}

/// Values of l = log f0 on the stencil {z - h, z, z + h}; throws on tail underflow.
struct log_f0_stencil {
  double minus;
  double center;
  double plus;
  double h;

  double first_derivative() const { return (plus - minus) / (2.0 * h); }
  double second_derivative() const { return (plus - 2.0 * center + minus) / (h * h); }
};

inline log_f0_stencil log_f0_on_stencil(double z, double alpha, const QuadratureConfig& cfg) {
  validate_alpha(alpha);
  validate(cfg);
  const double h = cfg.fd_grid_width;
  // The linear part log 2 + z of l(z) is dropped: it has zero second difference
  // and contributes exactly 1 to the first difference, added back below.
  const double lm = detail::standard_log_density_at_log(z - h, alpha, cfg);
  const double lc = detail::standard_log_density_at_log(z, alpha, cfg);
  const double lp = detail::standard_log_density_at_log(z + h, alpha, cfg);
  if (!(std::isfinite(lm) && std::isfinite(lc) && std::isfinite(lp))) {
    std::ostringstream msg;
    msg << "f0 underflows on the difference stencil at z=" << z << " alpha=" << alpha;
    throw error(error_category::tail_underflow, msg.str());
  }
  return {lm, lc, lp, h};
}

/// l'(z) by central differences, l = log f0.
inline double log_f0_first_derivative(double z, double alpha, const QuadratureConfig& cfg = {}) {
  return 1.0 + log_f0_on_stencil(z, alpha, cfg).first_derivative();
}

/// l''(z) by central differences, l = log f0.
inline double log_f0_second_derivative(double z, double alpha, const QuadratureConfig& cfg = {}) {
  return log_f0_on_stencil(z, alpha, cfg).second_derivative();
}

// ---------------------------------------------------------------------------
// Sampling (Chambers-Mallows-Stuck, symmetric case), driven by Philox so that
// the draw at (seed, stream, index) does not depend on any other draw.

/// Stream reserved for sample(); projection matrices use their row index.
inline constexpr std::uint64_t kSampleStream = ~std::uint64_t{0};

/// log|X| and sign of a standard draw from two uniforms in (0, 1).
inline std::pair<double, bool> standard_log_abs_variate(double alpha, double u1, double u2) {
  const double v = detail::kPi * (u1 - 0.5);  // (-pi/2, pi/2)
  const double w = -std::log(u2);             // Exp(1)
  const bool negative = v < 0.0;
  const double av = std::abs(v);
  if (detail::is_gaussian(alpha)) {
    return {std::log(2.0 * std::sin(av)) + 0.5 * std::log(w), negative};
  }
  if (alpha == 1.0) return {std::log(std::tan(av)), negative};
  const double log_abs = std::log(std::sin(alpha * av)) - std::log(std::cos(av)) / alpha +
                         (1.0 - alpha) / alpha * (std::log(std::cos((1.0 - alpha) * av)) - std::log(w));
  return {log_abs, negative};
}

inline double stable_variate(double alpha, std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const auto u = philox_uniforms(seed, stream, index);
  const auto [log_abs, negative] = standard_log_abs_variate(alpha, u.u1, u.u2);
  const double mag = std::exp(log_abs);
  return negative ? -mag : mag;
}

inline std::vector<double> sample(const StableParams& p, std::size_t n, std::uint64_t seed) {
  validate(p);
  require(n >= 1, "sample size must be at least 1");
  const double gamma = p.gamma();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gamma * stable_variate(p.alpha, seed, kSampleStream, i);
  return out;
}

}  // namespace stablesketch
