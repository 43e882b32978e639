// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include <cmath>
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"
#include "stablesketch/philox.hpp"
#include "stablesketch/projection.hpp"
#include "stablesketch/simulation.hpp"
#include "stablesketch/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace ss = stablesketch;

namespace {

// Uniform(-1, 1) entries from a stream disjoint from the projection streams.
ss::DataMatrix uniform_data(std::size_t n, std::size_t m, std::uint64_t seed) {
  ss::DataMatrix d(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) d(r, c) = 2.0 * ss::philox_uniforms(seed, r, c).u1 - 1.0;
  }
  return d;
}

// Binary rows that differ in the first `mismatches` coordinates and are zero
// elsewhere. Shared nonzero support is avoided: at small alpha a single huge
// shared projection term can cancel the difference exactly in double precision.
ss::DataMatrix hamming_pair(std::size_t m, std::size_t mismatches) {
  ss::DataMatrix d(2, m);
  for (std::size_t c = 0; c < mismatches; ++c) (c % 2 == 0 ? d(0, c) : d(1, c)) = 1.0;
  return d;
}

std::vector<double> row_difference(const ss::SketchMatrix& sk, std::size_t i, std::size_t j) {
  std::vector<double> x(sk.values.cols());
  for (std::size_t z = 0; z < x.size(); ++z) x[z] = sk.values(i, z) - sk.values(j, z);
  return x;
}

}  // namespace

TEST_CASE("exact distance examples", "[distance]") {
  const std::vector<double> u{1.0, 0.0};
  const std::vector<double> v{0.0, 1.0};
  CHECK(ss::exact_distance(u, u, 1.0) == 0.0);
  CHECK(ss::exact_distance(u, v, 1.0) == 2.0);
  CHECK(ss::exact_distance(u, v, 0.5) == 2.0);
  const std::vector<double> a{0.3, -2.0, 5.0};
  const std::vector<double> b{1.0, 1.0, 5.0};
  for (double alpha : {0.2, 0.9, 1.7}) {
    CHECK(ss::exact_distance(a, b, alpha) == ss::exact_distance(b, a, alpha));
    CHECK_THAT(ss::exact_distance(a, b, alpha), WithinRel(std::pow(0.7, alpha) + std::pow(3.0, alpha), 1e-15));
  }
  CHECK_THROWS_AS(ss::exact_distance(u, a, 1.0), ss::error);
}

TEST_CASE("binary vectors give the Hamming distance for every alpha", "[distance][property]") {
  const auto d = hamming_pair(1000, 100);
  for (double alpha : {0.01, 0.2, 1.0, 2.0}) CHECK(ss::exact_distance(d.row(0), d.row(1), alpha) == 100.0);
}

TEST_CASE("projection matrix is deterministic and independent of thread count", "[projection][property]") {
  const ss::ProjectionSpec spec{0.8, 16, 42, 37};
  const auto x = ss::generate_projection(spec);
  CHECK(x == ss::generate_projection(spec));
  CHECK(x == ss::generate_projection(spec, 4));
  CHECK(x(3, 5) == ss::stable_variate(0.8, 42, 3, 5));
  CHECK_FALSE(x == ss::generate_projection({0.8, 16, 43, 37}));
  CHECK_THROWS_AS(ss::generate_projection({0.8, 1, 1, 1}), ss::error);
  CHECK_THROWS_AS(ss::generate_projection({0.1, 4, 1, 1}), ss::error);
}

TEST_CASE("projection entries are standard stable draws", "[projection]") {
  // One entry per seed, as with a 1 x 1 projection drawn afresh each time.
  constexpr std::size_t n = 100000;
  std::vector<double> draws(n);
  for (std::size_t s = 0; s < n; ++s) draws[s] = ss::generate_projection({1.5, 2, s, 1})(0, 0);
  const ss::StableParams p{1.5, 1.0};
  const double d = ss::stats::ks_statistic(draws, [&](double x) { return ss::cdf(x, p); });
  CHECK(d < ss::stats::ks_critical_1pct(n));
}

TEST_CASE("projection columns are uncorrelated", "[projection]") {
  const std::size_t m = 20000;
  const auto x = ss::generate_projection({2.0, 3, 8, m});
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      double sab = 0.0;
      double saa = 0.0;
      double sbb = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
        sab += x(l, a) * x(l, b);
        saa += x(l, a) * x(l, a);
        sbb += x(l, b) * x(l, b);
      }
      CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 3.0 / std::sqrt(static_cast<double>(m)));
    }
  }
}

TEST_CASE("sketch basics", "[sketch]") {
  auto data = uniform_data(5, 30, 1);
  for (std::size_t c = 0; c < 30; ++c) data(4, c) = data(1, c);
  const ss::ProjectionSpec spec{1.2, 12, 9, 30};
  const auto sk = ss::sketch(data, spec);
  REQUIRE(sk.values.rows() == 5);
  REQUIRE(sk.values.cols() == 12);
  for (std::size_t z = 0; z < 12; ++z) CHECK(sk.values(1, z) - sk.values(4, z) == 0.0);

  auto doubled = data;
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 30; ++c) doubled(r, c) *= 2.0;
  }
  const auto sk2 = ss::sketch(doubled, spec);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t z = 0; z < 12; ++z) CHECK(sk2.values(r, z) == 2.0 * sk.values(r, z));
  }
  CHECK(ss::sketch(data, spec, 3).values == sk.values);

  const auto single = ss::sketch(uniform_data(1, 30, 2), spec);
  CHECK(single.values.rows() == 1);
  CHECK(single.values.cols() == 12);

  CHECK_THROWS_AS(ss::sketch(data, {1.2, 12, 9, 31}), ss::error);
  auto bad = data;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(ss::sketch(bad, spec), ss::error);
}

TEST_CASE("projected differences follow the stable law with theta = d_alpha", "[sketch][oracle]") {
  constexpr std::size_t k = 10000;
  {
    const auto data = uniform_data(2, 100, 3);
    const double D = ss::exact_distance(data.row(0), data.row(1), 1.0);
    const auto sk = ss::sketch(data, {1.0, k, 17, 100});
    const double d = ss::stats::ks_statistic(row_difference(sk, 0, 1), [&](double x) {
      return 0.5 + std::atan(x / D) / std::numbers::pi;
    });
    CHECK(d < ss::stats::ks_critical_1pct(k));
  }
  {
    const auto data = uniform_data(2, 50, 4);
    const double D = ss::exact_distance(data.row(0), data.row(1), 0.5);
    const auto sk = ss::sketch(data, {0.5, k, 18, 50});
    const ss::StableParams p{0.5, D};
    const double d = ss::stats::ks_statistic(row_difference(sk, 0, 1), [&](double x) { return ss::cdf(x, p); });
    CHECK(d < ss::stats::ks_critical_1pct(k));
  }
}

TEST_CASE("estimate_pair rejects identical rows and mismatched tables", "[estimate_pair][errors]") {
  auto data = uniform_data(3, 20, 5);
  for (std::size_t c = 0; c < 20; ++c) data(2, c) = data(0, c);
  const auto sk = ss::sketch(data, {1.0, 8, 1, 20});
  const auto table = ss::build_weight_table(1.0, 8, false);
  CHECK_THROWS_AS(ss::estimate_pair(sk, 0, 2, table), ss::degenerate_coordinate);
  CHECK_NOTHROW(ss::estimate_pair(sk, 0, 1, table));
  CHECK_THROWS_AS(ss::estimate_pair(sk, 0, 0, table), ss::error);
  CHECK_THROWS_AS(ss::estimate_pair(sk, 0, 3, table), ss::error);
  try {
    (void)ss::estimate_pair(sk, 0, 1, ss::build_weight_table(1.0, 9, false));
    FAIL("expected mismatch");
  } catch (const ss::error& e) {
    CHECK(e.category() == ss::error_category::mismatch);
  }
  CHECK_THROWS_AS(ss::estimate_pair(sk, 0, 1, ss::build_weight_table(0.9, 8, false)), ss::error);
}

TEST_CASE("estimate_pair is unbiased for d_1 over projection seeds", "[estimate_pair][simulation]") {
  const auto data = uniform_data(2, 500, 6);
  const double D = ss::exact_distance(data.row(0), data.row(1), 1.0);
  const auto table = ss::build_weight_table(1.0, 400, false);
  double sum = 0.0;
  double se = 0.0;
  constexpr int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const auto e = ss::estimate_pair(ss::sketch(data, {1.0, 400, static_cast<std::uint64_t>(s), 500}), 0, 1, table);
    sum += e.theta_hat;
    se = e.se;
  }
  CHECK(std::abs(sum / seeds - D) < 3.0 * se * D / std::sqrt(static_cast<double>(seeds)));
}

TEST_CASE("Hamming distance recovery at alpha = 0.2", "[estimate_pair][simulation]") {
  const auto data = hamming_pair(1000, 100);
  const auto table = ss::build_weight_table(0.2, 400, false);
  double sum = 0.0;
  constexpr int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    sum += ss::estimate_pair(ss::sketch(data, {0.2, 400, static_cast<std::uint64_t>(s), 1000}), 0, 1, table)
               .theta_hat;
  }
  CHECK_THAT(sum / seeds, WithinRel(100.0, 0.10));
}

TEST_CASE("relative error shrinks with k", "[estimate][property]") {
  for (double a : {0.5, 1.0, 1.5}) {
    auto median_error = [&](std::size_t k) {
      const auto table = ss::build_weight_table(a, k, false);
      std::vector<double> err;
      for (int r = 0; r < 100; ++r) {
        err.push_back(std::abs(ss::estimate(ss::simulated_location_sample(a, k, 21, r), table).theta_hat - 1.0));
      }
      return ss::stats::median(err);
    };
    CHECK(median_error(1600) < median_error(100));
  }
}

TEST_CASE("estimate_all_pairs", "[estimate_all_pairs]") {
  SECTION("single row") {
    const auto sk = ss::sketch(uniform_data(1, 10, 7), {1.0, 6, 1, 10});
    const auto all = ss::estimate_all_pairs(sk, ss::build_weight_table(1.0, 6, false));
    CHECK(all.size() == 1);
    CHECK(all.degenerate_count() == 0);
    CHECK(all(0, 0).estimate.theta_hat == 0.0);
  }
  SECTION("identical rows are all flagged") {
    ss::DataMatrix d(3, 10, 0.5);
    const auto sk = ss::sketch(d, {1.0, 6, 1, 10});
    const auto all = ss::estimate_all_pairs(sk, ss::build_weight_table(1.0, 6, false));
    CHECK(all.degenerate_count() == 3);
    CHECK(all(2, 0).degenerate);
  }
  SECTION("symmetric, zero diagonal, thread independent") {
    const auto sk = ss::sketch(uniform_data(6, 40, 8), {1.4, 32, 2, 40});
    const auto table = ss::build_weight_table(1.4, 32, false);
    const auto a = ss::estimate_all_pairs(sk, table);
    const auto b = ss::estimate_all_pairs(sk, table, 3);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(a(i, i).estimate.theta_hat == 0.0);
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(a(i, j).estimate.theta_hat == a(j, i).estimate.theta_hat);
        CHECK(a(i, j).estimate.theta_hat == b(i, j).estimate.theta_hat);
        if (i < j) CHECK(a(i, j).estimate.theta_hat == ss::estimate_pair(sk, i, j, table).theta_hat);
      }
    }
  }
}

TEST_CASE("distortion sandwich holds for most pairs", "[estimate_all_pairs][simulation]") {
  const auto data = uniform_data(20, 500, 9);
  const auto table = ss::build_weight_table(1.0, 400, false);
  const auto all = ss::estimate_all_pairs(ss::sketch(data, {1.0, 400, 77, 500}), table);
  int inside = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = i + 1; j < 20; ++j) {
      const double d = ss::exact_distance(data.row(i), data.row(j), 1.0);
      const double e = all(i, j).estimate.theta_hat;
      inside += (0.75 * d <= e && e <= 1.25 * d) ? 1 : 0;
    }
  }
  CHECK(inside >= 171);
}
