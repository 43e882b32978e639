// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A draw is a pure function of (key, counter), so any entry of a random
// matrix can be produced independently of evaluation order.

#pragma once

#include <array>
#include <cstdint>

namespace stablesketch {

using philox_counter = std::array<std::uint32_t, 4>;
using philox_key = std::array<std::uint32_t, 2>;

namespace detail {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57;

constexpr void philox_round(philox_counter& ctr, const philox_key& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM4x32A) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM4x32B) * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

constexpr philox_counter philox4x32(philox_counter ctr, philox_key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kPhiloxW32A;
      key[1] += detail::kPhiloxW32B;
    }
    detail::philox_round(ctr, key);
  }
  return ctr;
}

/// Two uniforms strictly inside (0, 1) with 53 random bits each, addressed by
/// (seed, stream, index).
struct uniform_pair {
  double u1;
  double u2;
};

constexpr uniform_pair philox_uniforms(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t index) {
  const philox_key key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const philox_counter ctr = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                              static_cast<std::uint32_t>(stream),
                              static_cast<std::uint32_t>(stream >> 32)};
  const philox_counter r = philox4x32(ctr, key);
  auto to_open_unit = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  };
  return {to_open_unit(r[0], r[1]), to_open_unit(r[2], r[3])};
}

}  // namespace stablesketch
