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

#include "precalq/half.hpp"

#include <bit>
#include <cmath>

namespace precalq {

std::uint16_t half_bits_from_double(double value) noexcept {
  const std::uint16_t sign = std::signbit(value) ? 0x8000u : 0u;
  if (std::isnan(value)) return static_cast<std::uint16_t>(sign | 0x7E00u);
  const double mag = std::fabs(value);
  if (std::isinf(mag)) return static_cast<std::uint16_t>(sign | 0x7C00u);
  if (mag == 0.0) return sign;

  // Quantum of the binary16 binade containing `mag` (subnormals share 2^-24).
  int exp2 = 0;
  std::frexp(mag, &exp2);  // mag = m * 2^exp2, m in [0.5, 1)
  int unbiased = exp2 - 1;
  if (unbiased < -14) unbiased = -14;
  const double quantum = std::ldexp(1.0, unbiased - 10);
  // Scaling by a power of two is exact, so nearbyint sees the true ratio.
  const double rounded = std::nearbyint(mag / quantum) * quantum;
  if (rounded > kHalfMax) return static_cast<std::uint16_t>(sign | 0x7C00u);

  if (rounded < std::ldexp(1.0, -14)) {
    const auto mant = static_cast<std::uint16_t>(std::ldexp(rounded, 24));
    return static_cast<std::uint16_t>(sign | mant);
  }
  int e = 0;
  const double m = std::frexp(rounded, &e);  // rounded may have carried into the next binade
  const int biased = (e - 1) + 15;
  const auto mant = static_cast<std::uint16_t>(std::ldexp(m, 11) - 1024.0);
  return static_cast<std::uint16_t>(sign | (biased << 10) | mant);
}

float half_bits_to_float(std::uint16_t bits) noexcept {
  const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
  const std::uint32_t exp = (bits >> 10) & 0x1Fu;
  const std::uint32_t mant = bits & 0x3FFu;
  if (exp == 0) {
    const float mag = std::ldexp(static_cast<float>(mant), -24);
    return sign ? -mag : mag;
  }
  if (exp == 0x1F) {
    return std::bit_cast<float>(sign | 0x7F800000u | (mant << 13));
  }
  return std::bit_cast<float>(sign | ((exp - 15 + 127) << 23) | (mant << 13));
}

}  // namespace precalq
