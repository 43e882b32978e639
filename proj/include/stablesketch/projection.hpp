// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Stable random projections. For X with i.i.d. standard entries of index
// alpha, the rows a, b of B = V X belonging to data rows u, v satisfy
//   a_z - b_z ~ F(x; alpha, d_alpha(u, v))  independently over z,
// so d_alpha is recovered by estimating the scale of k projected differences.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "stablesketch/error.hpp"
#include "stablesketch/lestimator.hpp"
#include "stablesketch/stable_numerics.hpp"

namespace stablesketch {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    require(values_.size() == rows_ * cols_, "matrix storage does not match its shape");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// n points in m dimensions, one per row.
using DataMatrix = Matrix;

struct ProjectionSpec {
  double alpha = 1.0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
};

struct SketchMatrix {
  ProjectionSpec spec;
  Matrix values;  // n x k
};

struct DistanceEstimate {
  double theta_hat = 0.0;  // estimate of d_alpha
  double gamma_hat = 0.0;  // estimate of d_alpha^(1/alpha)
  double se = 0.0;         // asymptotic standard error of log gamma_hat, 1 / sqrt(k I_mu)
};

inline void validate(const ProjectionSpec& spec) {
  validate_table_alpha(spec.alpha);
  require(spec.k >= 2, "projection dimension k must be at least 2");
  require(spec.m >= 1, "original dimension m must be at least 1");
}

inline void validate(const DataMatrix& data) {
  require(data.rows() >= 1 && data.cols() >= 1, "data matrix must have at least one row and one column");
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (!std::isfinite(data(r, c))) {
        throw error(error_category::invalid_argument, "non-finite data value at row " + std::to_string(r) +
                                                          ", column " + std::to_string(c));
      }
    }
  }
}

/// d_alpha(u, v) = sum_i |u_i - v_i|^alpha, with |0|^alpha = 0.
inline double exact_distance(std::span<const double> u, std::span<const double> v, double alpha) {
  validate_alpha(alpha);
  if (u.size() != v.size()) {
    throw error(error_category::mismatch, "vectors have different lengths " + std::to_string(u.size()) + " and " +
                                              std::to_string(v.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = std::abs(u[i] - v[i]);
    if (d != 0.0) sum += std::pow(d, alpha);
  }
  return sum;
}

namespace detail {

// Runs body(begin, end) over [0, n) split into contiguous chunks. Results must
// not depend on the split, which holds when each index is processed alone.
template <class Body>
void parallel_for_rows(std::size_t n, unsigned threads, Body&& body) {
  if (threads <= 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    pool.emplace_back([&body, begin, end = std::min(n, begin + chunk)] { body(begin, end); });
  }
}

}  // namespace detail

/// m x k matrix whose entry (l, z) is the standard stable draw at
/// (seed, stream = l, index = z).
inline Matrix generate_projection(const ProjectionSpec& spec, unsigned threads = 1) {
  validate(spec);
  Matrix x(spec.m, spec.k);
  detail::parallel_for_rows(spec.m, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      for (std::size_t z = 0; z < spec.k; ++z) x(l, z) = stable_variate(spec.alpha, spec.seed, l, z);
    }
  });
  return x;
}

/// B = V X with X from generate_projection(spec).
inline SketchMatrix sketch(const DataMatrix& data, const ProjectionSpec& spec, unsigned threads = 1) {
  validate(spec);
  validate(data);
  if (data.cols() != spec.m) {
    throw error(error_category::mismatch, "data has " + std::to_string(data.cols()) +
                                              " columns but the projection expects m=" + std::to_string(spec.m));
  }
  const Matrix x = generate_projection(spec, threads);
  SketchMatrix out{spec, Matrix(data.rows(), spec.k)};
  detail::parallel_for_rows(data.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto b = out.values.row(r);
      for (std::size_t l = 0; l < spec.m; ++l) {
        const double v = data(r, l);
        if (v == 0.0) continue;
        const auto xl = x.row(l);
        for (std::size_t z = 0; z < spec.k; ++z) b[z] += v * xl[z];
      }
    }
  });
  return out;
}

inline void check_compatible(const SketchMatrix& sk, const WeightTable& table) {
  if (sk.spec.alpha != table.alpha || sk.spec.k != table.k) {
    throw error(error_category::mismatch, "sketch (alpha=" + std::to_string(sk.spec.alpha) +
                                              ", k=" + std::to_string(sk.spec.k) + ") does not match table (alpha=" +
                                              std::to_string(table.alpha) + ", k=" + std::to_string(table.k) + ")");
  }
}

/// Estimates d_alpha between sketch rows i and j. O(k), radix-sorted ranks;
/// independent of m and n.
inline DistanceEstimate estimate_pair(const SketchMatrix& sk, std::size_t i, std::size_t j, const WeightTable& table) {
  check_compatible(sk, table);
  const std::size_t n = sk.values.rows();
  require(i < n && j < n, "row index out of range");
  require(i != j, "estimate_pair needs two distinct rows");
  const auto a = sk.values.row(i);
  const auto b = sk.values.row(j);
  LocationSample sample;
  sample.y.resize(table.k);
  for (std::size_t z = 0; z < table.k; ++z) {
    const double d = a[z] - b[z];
    if (d == 0.0) {
      throw degenerate_coordinate(z, "rows " + std::to_string(i) + " and " + std::to_string(j) +
                                         " have identical projections at coordinate " + std::to_string(z));
    }
    sample.y[z] = std::log(std::abs(d));
  }
  const EstimateResult r = estimate(sample, table);
  return {r.theta_hat, r.gamma_hat, r.se_mu};
}

struct PairEstimate {
  DistanceEstimate estimate;
  bool degenerate = false;
};

/// n x n symmetric table of pair estimates; exact zero on the diagonal.
class PairwiseEstimates {
 public:
  explicit PairwiseEstimates(std::size_t n) : n_(n), entries_(n * n) {}

  std::size_t size() const noexcept { return n_; }
  PairEstimate& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const PairEstimate& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  std::size_t degenerate_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) c += entries_[i * n_ + j].degenerate ? 1 : 0;
    }
    return c;
  }

 private:
  std::size_t n_;
  std::vector<PairEstimate> entries_;
};

inline PairwiseEstimates estimate_all_pairs(const SketchMatrix& sk, const WeightTable& table, unsigned threads = 1) {
  check_compatible(sk, table);
  const std::size_t n = sk.values.rows();
  PairwiseEstimates out(n);
  detail::parallel_for_rows(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        PairEstimate e;
        try {
          e.estimate = estimate_pair(sk, i, j, table);
        } catch (const degenerate_coordinate&) {
          e.degenerate = true;
        }
        out(i, j) = e;
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  }
  return out;
}

}  // namespace stablesketch
