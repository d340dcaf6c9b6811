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

#pragma once

#include <cstdint>

namespace precalq {

// IEEE-754 binary16 helpers. Conversions round to nearest, ties to even, and
// overflow to infinity exactly like a hardware F16C conversion would.

/// Rounds a double directly to binary16 (no intermediate float rounding).
std::uint16_t half_bits_from_double(double value) noexcept;

/// Exact widening of a binary16 bit pattern.
float half_bits_to_float(std::uint16_t bits) noexcept;

/// `value` rounded to the nearest binary16 and widened back.
inline float round_to_half(double value) noexcept {
  return half_bits_to_float(half_bits_from_double(value));
}

inline constexpr double kHalfMax = 65504.0;
inline constexpr double kHalfMinSubnormal = 5.9604644775390625e-08;  // 2^-24

}  // namespace precalq
