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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "precalq/quantizer.hpp"

namespace precalq {

// PCQ1 artifact, little-endian throughout. See docs/PCQ1.md for a worked
// hex dump.
//
//   "PCQ1" | u32 version | u32 tensor count
//   per tensor, header:
//     u16 name length | name bytes | u32 rows | u32 cols
//     u8 b_C | u8 b_O | u32 group size | f64 alpha
//     u8 clip enabled | f64 clip percentile | u8 clip scope | f64 lambda'
//     u32 common group count | u32 outlier count | u32 outlier group count
//   per tensor, payload (each section starts on a byte boundary):
//     common params    common group count x (u16 scale, u16 offset), binary16
//     outlier params   outlier group count x (u16 scale, u16 offset), binary16
//     outlier counts   one unsigned LEB128 per common group
//     outlier stream   per outlier: intra index (log2 g bits) then code (b_O bits)
//     common stream    per common weight: code (b_C bits)
// Bitstreams are MSB-first within each byte and zero-padded to a byte.
inline constexpr char kPcqMagic[4] = {'P', 'C', 'Q', '1'};
inline constexpr std::uint32_t kPcqVersion = 1;

/// Closed-form storage cost per weight:
///   (b_C + 32/g)(1 - alpha) + (b_O + log2 g + 32/g) alpha.
double avg_bits(const QuantConfig& config);

/// Byte sizes of the payload sections of one packed tensor.
struct PayloadLayout {
  std::size_t common_params = 0;
  std::size_t outlier_params = 0;
  std::size_t outlier_counts = 0;
  std::size_t outlier_stream = 0;
  std::size_t common_stream = 0;

  std::size_t total() const noexcept {
    return common_params + outlier_params + outlier_counts + outlier_stream + common_stream;
  }
};

PayloadLayout payload_layout(const QuantizedTensor& q);

/// Payload bits (params, counts and both streams; no headers) per weight.
/// Always >= avg_bits(q.config) because the formula has no term for the
/// per-group outlier counts.
double measured_bits_per_weight(const QuantizedTensor& q);

std::vector<std::uint8_t> pack_artifact(std::span<const QuantizedTensor> tensors);
/// Throws BadMagic or Corrupt.
std::vector<QuantizedTensor> unpack_artifact(std::span<const std::uint8_t> bytes);

/// Single-tensor artifact.
std::vector<std::uint8_t> pack(const QuantizedTensor& q);
/// Throws Corrupt unless the artifact holds exactly one tensor.
QuantizedTensor unpack(std::span<const std::uint8_t> bytes);

void save_artifact(std::span<const QuantizedTensor> tensors, const std::filesystem::path& path);
std::vector<QuantizedTensor> load_artifact(const std::filesystem::path& path);

}  // namespace precalq
