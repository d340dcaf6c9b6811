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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precalq/half.hpp"
#include "precalq/saliency.hpp"
#include "precalq/tensor_io.hpp"

namespace precalq {

enum class ClipScope : std::uint8_t { PerGroup = 0, PerTensor = 1 };

struct QuantConfig {
  int bits_common = 4;    // b_C
  int bits_outlier = 4;   // b_O
  int group_size = 128;   // g, power of two
  double alpha = 0.0;     // salient fraction
  std::optional<double> clip_percentile;  // applied to common weights only
  ClipScope clip_scope = ClipScope::PerGroup;

  /// Throws BadBits / BadConfig / BadAlpha / BadPercentile.
  void validate() const;
  int index_bits() const noexcept;  // log2(group_size)

  friend bool operator==(const QuantConfig&, const QuantConfig&) = default;
};

/// Affine minmax parameters, held as binary16 bit patterns so the values used
/// for dequantization are exactly the values that get serialized.
struct GroupParams {
  std::uint16_t scale_bits = 0x3C00;  // 1.0
  std::uint16_t offset_bits = 0;

  float scale() const noexcept { return half_bits_to_float(scale_bits); }
  float offset() const noexcept { return half_bits_to_float(offset_bits); }

  friend bool operator==(const GroupParams&, const GroupParams&) = default;
};

struct OutlierRecord {
  std::uint32_t group_index = 0;  // logical (row-wise) group the weight sits in
  std::uint32_t intra_index = 0;  // position within that group, < group_size
  std::uint8_t code = 0;

  friend bool operator==(const OutlierRecord&, const OutlierRecord&) = default;
};

/// Salient/common split of a tensor with each class quantized separately.
///
/// Common weights are grouped row-wise in runs of `group_size` positions;
/// the last group of a row may be shorter. Salient positions inside a group
/// are skipped: they neither affect the group's min/max nor carry a common
/// code. Salient weights are gathered in row-major order and regrouped in
/// runs of `group_size` with their own parameters (the final run may be short).
struct QuantizedTensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  QuantConfig config;
  double lambda_prime = 0.0;

  std::vector<std::uint8_t> common_codes;        // row-major, salient positions skipped
  std::vector<GroupParams> common_group_params;  // rows * groups_per_row
  std::vector<OutlierRecord> outliers;           // sorted by (group_index, intra_index)
  std::vector<GroupParams> outlier_group_params; // ceil(outliers / group_size)

  std::size_t size() const noexcept { return rows * cols; }
  std::size_t groups_per_row() const noexcept;
  std::size_t group_count() const noexcept { return rows * groups_per_row(); }
  /// Width of logical group `group_index` (short at the end of a row).
  std::size_t group_width(std::size_t group_index) const noexcept;

  /// Structural checks (coverage, ordering, code ranges). Throws CoverageViolation.
  void validate() const;

  friend bool operator==(const QuantizedTensor&, const QuantizedTensor&) = default;
};

struct GroupQuant {
  GroupParams params;
  std::vector<std::uint8_t> codes;
};

/// Minmax parameters for a group spanning [lo, hi]:
///   scale = (hi - lo) / (2^bits - 1), offset = lo, both rounded to binary16.
/// A degenerate range uses scale 1. If the scale underflows binary16 it is
/// raised to the smallest subnormal so it stays positive. Throws OutOfRange
/// when a parameter overflows binary16.
GroupParams minmax_params(float lo, float hi, int bits);

/// clamp(round_half_even((v - offset) / scale), 0, 2^bits - 1).
std::uint8_t encode_value(float v, const GroupParams& params, int bits) noexcept;

/// code * scale + offset with the stored (binary16) parameters.
float decode_value(std::uint8_t code, const GroupParams& params) noexcept;

/// Throws EmptyGroup, BadBits, NonFinite.
GroupQuant quantize_group(std::span<const float> values, int bits);
std::vector<float> dequantize_group(const GroupParams& params, std::span<const std::uint8_t> codes);

/// Empirical percentile of |v| with linear interpolation between order
/// statistics (position (n - 1) * p in the ascending order). Throws
/// BadPercentile unless 0.5 < p <= 1, EmptyGroup on empty input.
double abs_percentile(std::span<const float> values, double percentile);

/// clamp(v, -t, t) with t = abs_percentile(values, percentile).
std::vector<float> clip_values(std::span<const float> values, double percentile);

/// The full salient/common pipeline. Rows are processed in parallel; the
/// result is bit-identical to reference::quantize_tensor for any thread count.
QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantConfig& config);

/// Same pipeline with a precomputed mask (must match the tensor's shape).
QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantConfig& config,
                                const SaliencyMask& mask);

/// Throws CoverageViolation on malformed input.
WeightTensor dequantize_tensor(const QuantizedTensor& q);

/// Plain round-to-nearest group quantization: no salient class, no clipping.
QuantizedTensor rtn_baseline(const WeightTensor& tensor, int bits, int group_size);

}  // namespace precalq
