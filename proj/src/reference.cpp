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

#include "precalq/reference.hpp"

#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "precalq/error.hpp"

namespace precalq::reference {

QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantConfig& config) {
  config.validate();
  tensor.validate();
  const SaliencyMask mask = select_salient(tensor, config.alpha);

  QuantizedTensor q;
  q.name = tensor.name;
  q.rows = tensor.rows;
  q.cols = tensor.cols;
  q.config = config;
  q.lambda_prime = mask.lambda_prime;

  const auto g = static_cast<std::size_t>(config.group_size);
  const std::size_t gpr = q.groups_per_row();
  const bool clipping = config.clip_percentile.has_value() && *config.clip_percentile < 1.0;

  double tensor_clip = 0.0;
  if (clipping && config.clip_scope == ClipScope::PerTensor) {
    std::vector<float> common;
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      if (!mask.salient[i]) common.push_back(tensor.data[i]);
    }
    if (!common.empty()) tensor_clip = abs_percentile(common, *config.clip_percentile);
  }

  std::vector<float> outlier_values;
  for (std::size_t r = 0; r < tensor.rows; ++r) {
    for (std::size_t j = 0; j < gpr; ++j) {
      const std::size_t start = j * g;
      const std::size_t width = std::min(g, tensor.cols - start);
      const auto group = static_cast<std::uint32_t>(r * gpr + j);
      std::vector<float> values;
      for (std::size_t c = 0; c < width; ++c) {
        const std::size_t i = r * tensor.cols + start + c;
        if (mask.salient[i]) {
          q.outliers.push_back({group, static_cast<std::uint32_t>(c), 0});
          outlier_values.push_back(tensor.data[i]);
        } else {
          values.push_back(tensor.data[i]);
        }
      }
      if (values.empty()) {
        q.common_group_params.emplace_back();
        continue;
      }
      if (clipping) {
        if (config.clip_scope == ClipScope::PerGroup) {
          values = clip_values(values, *config.clip_percentile);
        } else {
          for (auto& v : values) v = detail::clamp_abs(v, tensor_clip);
        }
      }
      GroupQuant gq = quantize_group(values, config.bits_common);
      q.common_group_params.push_back(gq.params);
      q.common_codes.insert(q.common_codes.end(), gq.codes.begin(), gq.codes.end());
    }
  }

  for (std::size_t begin = 0; begin < outlier_values.size(); begin += g) {
    const std::size_t end = std::min(outlier_values.size(), begin + g);
    GroupQuant gq = quantize_group(std::span<const float>(outlier_values).subspan(begin, end - begin),
                                   config.bits_outlier);
    q.outlier_group_params.push_back(gq.params);
    for (std::size_t k = begin; k < end; ++k) q.outliers[k].code = gq.codes[k - begin];
  }
  return q;
}

WeightTensor dequantize_tensor(const QuantizedTensor& q) {
  q.validate();
  const auto g = static_cast<std::size_t>(q.config.group_size);
  const std::size_t gpr = q.groups_per_row();

  // Dense map: position -> outlier record index, or npos for common weights.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> outlier_at(q.size(), npos);
  for (std::size_t k = 0; k < q.outliers.size(); ++k) {
    const auto& rec = q.outliers[k];
    const std::size_t r = rec.group_index / gpr;
    const std::size_t j = rec.group_index % gpr;
    outlier_at[r * q.cols + j * g + rec.intra_index] = k;
  }

  WeightTensor out{q.name, q.rows, q.cols, std::vector<float>(q.size())};
  std::size_t co = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::size_t k = outlier_at[i];
    if (k != npos) {
      out.data[i] = decode_value(q.outliers[k].code, q.outlier_group_params[k / g]);
    } else {
      const std::size_t r = i / q.cols;
      const std::size_t j = (i % q.cols) / g;
      out.data[i] = decode_value(q.common_codes[co++], q.common_group_params[r * gpr + j]);
    }
  }
  return out;
}

std::vector<std::uint64_t> histogram_counts(std::span<const float> samples, double lo, double hi,
                                            std::size_t bins) {
  std::vector<std::uint64_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (float v : samples) {
    std::size_t b = 0;
    if (width > 0.0) {
      const double pos = (static_cast<double>(v) - lo) / width;
      b = pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
    }
    ++counts[b];
  }
  return counts;
}

double mse(const WeightTensor& a, const WeightTensor& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.data.size() != b.data.size()) {
    throw Error(Errc::ShapeMismatch, "mse operands differ in shape");
  }
  if (a.data.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < a.rows; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
      const double d = static_cast<double>(a.data[r * a.cols + c]) - static_cast<double>(b.data[r * a.cols + c]);
      row += d * d;
    }
    total += row;
  }
  return total / static_cast<double>(a.data.size());
}

}  // namespace precalq::reference
