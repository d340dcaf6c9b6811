// Copyright 2026 The precalq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdint>
#include <random>

#include <gtest/gtest.h>

#include "precalq/half.hpp"

namespace precalq {
namespace {

// Independent decoder: value = (-1)^s * 2^(e-15) * (1 + m/1024), subnormals
// 2^-14 * m/1024.
double oracle_decode(std::uint16_t h) {
  const int s = h >> 15;
  const int e = (h >> 10) & 0x1F;
  const int m = h & 0x3FF;
  double v;
  if (e == 0) {
    v = std::ldexp(m, -24);
  } else if (e == 31) {
    v = m == 0 ? INFINITY : NAN;
  } else {
    v = std::ldexp(1024 + m, e - 25);
  }
  return s ? -v : v;
}

TEST(Half, DecodesEveryBitPattern) {
  for (std::uint32_t h = 0; h <= 0xFFFF; ++h) {
    const double expect = oracle_decode(static_cast<std::uint16_t>(h));
    const float got = half_bits_to_float(static_cast<std::uint16_t>(h));
    if (std::isnan(expect)) {
      EXPECT_TRUE(std::isnan(got)) << h;
    } else {
      EXPECT_EQ(static_cast<double>(got), expect) << h;
    }
  }
}

TEST(Half, EncodeRoundTripsEveryFiniteValue) {
  for (std::uint32_t h = 0; h <= 0xFFFF; ++h) {
    const auto bits = static_cast<std::uint16_t>(h);
    const double v = oracle_decode(bits);
    if (!std::isfinite(v)) continue;
    if (v == 0.0) {
      EXPECT_EQ(half_bits_from_double(v) & 0x7FFF, 0) << h;
      continue;
    }
    EXPECT_EQ(half_bits_from_double(v), bits) << h;
  }
}

TEST(Half, RoundsToNearestWithTiesToEven) {
  // Halfway between 1.0 (0x3C00) and the next half (0x3C01).
  EXPECT_EQ(half_bits_from_double(1.0 + std::ldexp(1.0, -11)), 0x3C00);
  // Halfway between 0x3C01 and 0x3C02 rounds up to the even mantissa.
  EXPECT_EQ(half_bits_from_double(1.0 + 3 * std::ldexp(1.0, -11)), 0x3C02);
  EXPECT_EQ(half_bits_from_double(1.0 + std::ldexp(1.0, -11) + 1e-12), 0x3C01);
  // Subnormal tie: half of the smallest subnormal goes to zero.
  EXPECT_EQ(half_bits_from_double(kHalfMinSubnormal / 2), 0x0000);
  EXPECT_EQ(half_bits_from_double(kHalfMinSubnormal * 0.51), 0x0001);
}

TEST(Half, OverflowBecomesInfinity) {
  EXPECT_EQ(half_bits_from_double(kHalfMax), 0x7BFF);
  EXPECT_EQ(half_bits_from_double(65519.0), 0x7BFF);
  EXPECT_EQ(half_bits_from_double(65520.0), 0x7C00);
  EXPECT_EQ(half_bits_from_double(-1e9), 0xFC00);
}

TEST(Half, RandomDoublesRoundToANearestNeighbour) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> exponent(-26.0, 16.0);
  std::uniform_real_distribution<double> unit(1.0, 2.0);
  for (int i = 0; i < 200000; ++i) {
    const double v = std::ldexp(unit(rng), static_cast<int>(exponent(rng))) * (i % 2 ? -1 : 1);
    if (std::fabs(v) >= kHalfMax) continue;
    const std::uint16_t h = half_bits_from_double(v);
    const double got = oracle_decode(h);
    // No other half may be strictly closer.
    const double err = std::fabs(got - v);
    const std::uint16_t mag = h & 0x7FFF;
    for (int d : {-1, 1}) {
      const int nb = static_cast<int>(mag) + d;
      if (nb < 0 || nb > 0x7BFF) continue;
      const double other = std::copysign(oracle_decode(static_cast<std::uint16_t>(nb)), v);
      ASSERT_LE(err, std::fabs(other - v)) << v;
    }
  }
}

}  // namespace
}  // namespace precalq
