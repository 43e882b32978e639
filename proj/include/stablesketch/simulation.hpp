// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Monte Carlo study of the L-estimator at theta = gamma = 1 (mu = 0).
// Replicate r draws its k values from Philox stream r of the given seed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stablesketch/lestimator.hpp"
#include "stablesketch/philox.hpp"
#include "stablesketch/stable_numerics.hpp"

namespace stablesketch {

struct MseSummary {
  double alpha = 0.0;
  std::size_t k = 0;
  std::size_t replicates = 0;
  double mean_mu = 0.0;
  double mean_gamma = 0.0;
  double mean_theta = 0.0;
  double mse_mu = 0.0;
  double mse_gamma = 0.0;
  double mse_theta = 0.0;
  double crlb_gamma = 0.0;  // 1 / (k I_mu) at gamma = 1
  double crlb_theta = 0.0;  // alpha^2 / (k I_mu) at theta = 1
};

/// y = log|x| for k standard draws of replicate r.
inline LocationSample simulated_location_sample(double alpha, std::size_t k, std::uint64_t seed,
                                                std::uint64_t replicate) {
  LocationSample s;
  s.y.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto u = philox_uniforms(seed, replicate, i);
    s.y[i] = standard_log_abs_variate(alpha, u.u1, u.u2).first;
  }
  return s;
}

inline MseSummary simulate_mse(const WeightTable& table, std::size_t replicates, std::uint64_t seed) {
  require(replicates >= 2, "at least two replicates are required");
  MseSummary out;
  out.alpha = table.alpha;
  out.k = table.k;
  out.replicates = replicates;
  for (std::size_t r = 0; r < replicates; ++r) {
    const EstimateResult e = estimate(simulated_location_sample(table.alpha, table.k, seed, r), table);
    out.mean_mu += e.mu_hat;
    out.mean_gamma += e.gamma_hat;
    out.mean_theta += e.theta_hat;
    out.mse_mu += e.mu_hat * e.mu_hat;
    out.mse_gamma += (e.gamma_hat - 1.0) * (e.gamma_hat - 1.0);
    out.mse_theta += (e.theta_hat - 1.0) * (e.theta_hat - 1.0);
  }
  const double n = static_cast<double>(replicates);
  out.mean_mu /= n;
  out.mean_gamma /= n;
  out.mean_theta /= n;
  out.mse_mu /= n;
  out.mse_gamma /= n;
  out.mse_theta /= n;
  const double kI = static_cast<double>(table.k) * table.I_mu;
  out.crlb_gamma = 1.0 / kI;
  out.crlb_theta = table.alpha * table.alpha / kI;
  return out;
}

}  // namespace stablesketch
