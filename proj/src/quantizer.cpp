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

#include "precalq/quantizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <tuple>

#include "detail.hpp"
#include "precalq/error.hpp"

namespace precalq {

void QuantConfig::validate() const {
  if (bits_common < 2 || bits_common > 8) throw Error(Errc::BadBits, "common bits must be in [2, 8]");
  if (bits_outlier < 2 || bits_outlier > 8) throw Error(Errc::BadBits, "outlier bits must be in [2, 8]");
  if (group_size < 2 || group_size > 65536 || !std::has_single_bit(static_cast<unsigned>(group_size))) {
    throw Error(Errc::BadConfig, "group size must be a power of two in [2, 65536]");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::BadAlpha, "alpha must lie in [0, 1]");
  if (clip_percentile && !(*clip_percentile > 0.5 && *clip_percentile <= 1.0)) {
    throw Error(Errc::BadPercentile, "clip percentile must lie in (0.5, 1]");
  }
}

int QuantConfig::index_bits() const noexcept {
  return std::countr_zero(static_cast<unsigned>(group_size));
}

std::size_t QuantizedTensor::groups_per_row() const noexcept {
  const auto g = static_cast<std::size_t>(config.group_size);
  return (cols + g - 1) / g;
}

std::size_t QuantizedTensor::group_width(std::size_t group_index) const noexcept {
  const auto g = static_cast<std::size_t>(config.group_size);
  const std::size_t j = group_index % groups_per_row();
  return std::min(g, cols - j * g);
}

void QuantizedTensor::validate() const {
  config.validate();
  auto fail = [this](const std::string& why) {
    throw Error(Errc::CoverageViolation, "quantized tensor '" + name + "': " + why);
  };
  if (rows == 0 || cols == 0) fail("empty shape");
  const std::size_t groups = group_count();
  if (common_group_params.size() != groups) fail("common group parameter count mismatch");
  if (common_codes.size() + outliers.size() != size()) fail("codes do not cover every position");
  const auto g = static_cast<std::size_t>(config.group_size);
  if (outlier_group_params.size() != (outliers.size() + g - 1) / g) fail("outlier group parameter count mismatch");

  const unsigned common_max = (1u << config.bits_common) - 1;
  const unsigned outlier_max = (1u << config.bits_outlier) - 1;
  for (std::size_t i = 0; i < outliers.size(); ++i) {
    const auto& r = outliers[i];
    if (r.group_index >= groups) fail("outlier group index out of range");
    if (r.intra_index >= group_width(r.group_index)) fail("outlier intra-group index out of range");
    if (r.code > outlier_max) fail("outlier code exceeds bit width");
    if (i > 0) {
      const auto& p = outliers[i - 1];
      if (std::tie(p.group_index, p.intra_index) >= std::tie(r.group_index, r.intra_index)) {
        fail("outlier records not strictly sorted");
      }
    }
  }
  for (auto c : common_codes) {
    if (c > common_max) fail("common code exceeds bit width");
  }
  auto check_params = [&](const GroupParams& p) {
    if (!std::isfinite(p.offset()) || !std::isfinite(p.scale()) || !(p.scale() > 0.0f)) {
      fail("group parameters must be finite with positive scale");
    }
  };
  std::for_each(common_group_params.begin(), common_group_params.end(), check_params);
  std::for_each(outlier_group_params.begin(), outlier_group_params.end(), check_params);
}

GroupParams minmax_params(float lo, float hi, int bits) {
  GroupParams p;
  p.offset_bits = half_bits_from_double(lo);
  if (!std::isfinite(p.offset())) throw Error(Errc::OutOfRange, "group minimum overflows binary16");
  if (hi > lo) {
    const double levels = static_cast<double>((1u << bits) - 1);
    const double scale = (static_cast<double>(hi) - static_cast<double>(lo)) / levels;
    p.scale_bits = half_bits_from_double(scale);
    if (!std::isfinite(p.scale())) throw Error(Errc::OutOfRange, "group scale overflows binary16");
    if (p.scale_bits == 0) p.scale_bits = 0x0001;  // smallest positive subnormal
  } else {
    p.scale_bits = 0x3C00;
  }
  return p;
}

std::uint8_t encode_value(float v, const GroupParams& params, int bits) noexcept {
  const double levels = static_cast<double>((1u << bits) - 1);
  const double q = std::nearbyint((static_cast<double>(v) - params.offset()) / params.scale());
  return static_cast<std::uint8_t>(std::clamp(q, 0.0, levels));
}

float decode_value(std::uint8_t code, const GroupParams& params) noexcept {
  return static_cast<float>(static_cast<double>(code) * params.scale() + params.offset());
}

GroupQuant quantize_group(std::span<const float> values, int bits) {
  if (bits < 2 || bits > 8) throw Error(Errc::BadBits, "bits must be in [2, 8]");
  if (values.empty()) throw Error(Errc::EmptyGroup, "cannot quantize an empty group");
  if (!std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); })) {
    throw Error(Errc::NonFinite, "group contains NaN/Inf");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  GroupQuant out;
  out.params = minmax_params(*lo, *hi, bits);
  out.codes.reserve(values.size());
  for (float v : values) out.codes.push_back(encode_value(v, out.params, bits));
  return out;
}

std::vector<float> dequantize_group(const GroupParams& params, std::span<const std::uint8_t> codes) {
  std::vector<float> out;
  out.reserve(codes.size());
  for (auto c : codes) out.push_back(decode_value(c, params));
  return out;
}

namespace {

void check_percentile(double p) {
  if (!(p > 0.5 && p <= 1.0)) throw Error(Errc::BadPercentile, "percentile must lie in (0.5, 1]");
}

}  // namespace

double abs_percentile(std::span<const float> values, double percentile) {
  check_percentile(percentile);
  if (values.empty()) throw Error(Errc::EmptyGroup, "percentile of an empty sequence");
  std::vector<float> mags(values.size());
  std::transform(values.begin(), values.end(), mags.begin(), [](float v) { return std::fabs(v); });
  std::sort(mags.begin(), mags.end());
  const double h = static_cast<double>(mags.size() - 1) * percentile;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= mags.size()) return mags[lo];
  return detail::interpolate_order_stat(mags[lo], mags[lo + 1], h);
}

std::vector<float> clip_values(std::span<const float> values, double percentile) {
  const double t = abs_percentile(values, percentile);
  std::vector<float> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [t](float v) { return detail::clamp_abs(v, t); });
  return out;
}

QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantConfig& config) {
  config.validate();
  return quantize_tensor(tensor, config, select_salient(tensor, config.alpha));
}

QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantConfig& config,
                                const SaliencyMask& mask) {
  config.validate();
  tensor.validate();
  if (mask.salient.size() != tensor.size()) throw Error(Errc::ShapeMismatch, "mask does not match tensor");

  QuantizedTensor q;
  q.name = tensor.name;
  q.rows = tensor.rows;
  q.cols = tensor.cols;
  q.config = config;
  q.lambda_prime = mask.lambda_prime;

  const std::size_t rows = tensor.rows;
  const std::size_t cols = tensor.cols;
  const auto g = static_cast<std::size_t>(config.group_size);
  const std::size_t gpr = q.groups_per_row();
  const auto& salient = mask.salient;

  // Row-level prefix sums place every row's codes without synchronization.
  std::vector<std::size_t> row_outliers(rows, 0);
  detail::parallel_for(static_cast<std::ptrdiff_t>(rows), [&](std::ptrdiff_t r) {
    std::size_t count = 0;
    for (std::size_t c = 0; c < cols; ++c) count += salient[r * cols + c] ? 1 : 0;
    row_outliers[r] = count;
  });
  std::vector<std::size_t> outlier_begin(rows + 1, 0);
  std::inclusive_scan(row_outliers.begin(), row_outliers.end(), outlier_begin.begin() + 1);
  const std::size_t total_outliers = outlier_begin[rows];
  auto common_begin = [&](std::size_t r) { return r * cols - outlier_begin[r]; };

  q.common_codes.resize(tensor.size() - total_outliers);
  q.common_group_params.resize(rows * gpr);
  q.outliers.resize(total_outliers);
  std::vector<float> outlier_values(total_outliers);

  const bool clipping = config.clip_percentile.has_value() && *config.clip_percentile < 1.0;
  double tensor_clip = 0.0;
  if (clipping && config.clip_scope == ClipScope::PerTensor && total_outliers < tensor.size()) {
    std::vector<float> mags(tensor.size() - total_outliers);
    detail::parallel_for(static_cast<std::ptrdiff_t>(rows), [&](std::ptrdiff_t r) {
      std::size_t out = common_begin(r);
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t i = r * cols + c;
        if (!salient[i]) mags[out++] = std::fabs(tensor.data[i]);
      }
    });
    tensor_clip = detail::abs_percentile_select(mags, *config.clip_percentile);
  }

  detail::parallel_for(static_cast<std::ptrdiff_t>(rows), [&](std::ptrdiff_t rr) {
    const auto r = static_cast<std::size_t>(rr);
    std::vector<float> values;
    std::vector<float> scratch;
    values.reserve(g);
    std::size_t co = common_begin(r);
    std::size_t oo = outlier_begin[r];
    for (std::size_t j = 0; j < gpr; ++j) {
      const std::size_t start = j * g;
      const std::size_t width = std::min(g, cols - start);
      const auto group = static_cast<std::uint32_t>(r * gpr + j);
      values.clear();
      for (std::size_t c = 0; c < width; ++c) {
        const std::size_t i = r * cols + start + c;
        if (salient[i]) {
          q.outliers[oo] = OutlierRecord{group, static_cast<std::uint32_t>(c), 0};
          outlier_values[oo] = tensor.data[i];
          ++oo;
        } else {
          values.push_back(tensor.data[i]);
        }
      }
      if (values.empty()) continue;  // group is all salient; default params stand
      if (clipping) {
        double t = tensor_clip;
        if (config.clip_scope == ClipScope::PerGroup) {
          scratch.resize(values.size());
          std::transform(values.begin(), values.end(), scratch.begin(), [](float v) { return std::fabs(v); });
          t = detail::abs_percentile_select(scratch, *config.clip_percentile);
        }
        for (auto& v : values) v = detail::clamp_abs(v, t);
      }
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      const GroupParams params = minmax_params(*lo, *hi, config.bits_common);
      q.common_group_params[group] = params;
      for (float v : values) q.common_codes[co++] = encode_value(v, params, config.bits_common);
    }
  });

  const std::size_t runs = (total_outliers + g - 1) / g;
  q.outlier_group_params.resize(runs);
  detail::parallel_for(static_cast<std::ptrdiff_t>(runs), [&](std::ptrdiff_t run) {
    const std::size_t begin = static_cast<std::size_t>(run) * g;
    const std::size_t end = std::min(total_outliers, begin + g);
    const auto [lo, hi] = std::minmax_element(outlier_values.begin() + static_cast<std::ptrdiff_t>(begin),
                                              outlier_values.begin() + static_cast<std::ptrdiff_t>(end));
    const GroupParams params = minmax_params(*lo, *hi, config.bits_outlier);
    q.outlier_group_params[run] = params;
    for (std::size_t k = begin; k < end; ++k) {
      q.outliers[k].code = encode_value(outlier_values[k], params, config.bits_outlier);
    }
  });
  return q;
}

WeightTensor dequantize_tensor(const QuantizedTensor& q) {
  q.validate();
  const std::size_t rows = q.rows;
  const std::size_t cols = q.cols;
  const auto g = static_cast<std::size_t>(q.config.group_size);
  const std::size_t gpr = q.groups_per_row();

  WeightTensor out{q.name, rows, cols, std::vector<float>(q.size())};
  detail::parallel_for(static_cast<std::ptrdiff_t>(rows), [&](std::ptrdiff_t rr) {
    const auto r = static_cast<std::size_t>(rr);
    const auto first = std::lower_bound(q.outliers.begin(), q.outliers.end(), r * gpr,
                                         [](const OutlierRecord& rec, std::size_t grp) { return rec.group_index < grp; });
    std::size_t oo = static_cast<std::size_t>(first - q.outliers.begin());
    std::size_t co = r * cols - oo;
    for (std::size_t j = 0; j < gpr; ++j) {
      const std::size_t start = j * g;
      const std::size_t width = std::min(g, cols - start);
      const std::size_t group = r * gpr + j;
      const GroupParams& params = q.common_group_params[group];
      for (std::size_t c = 0; c < width; ++c) {
        float& dst = out.data[r * cols + start + c];
        if (oo < q.outliers.size() && q.outliers[oo].group_index == group && q.outliers[oo].intra_index == c) {
          dst = decode_value(q.outliers[oo].code, q.outlier_group_params[oo / g]);
          ++oo;
        } else {
          dst = decode_value(q.common_codes[co++], params);
        }
      }
    }
  });
  return out;
}

QuantizedTensor rtn_baseline(const WeightTensor& tensor, int bits, int group_size) {
  QuantConfig config;
  config.bits_common = bits;
  config.bits_outlier = bits;
  config.group_size = group_size;
  config.alpha = 0.0;
  return quantize_tensor(tensor, config);
}

}  // namespace precalq
