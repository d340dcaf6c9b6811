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
#include <string>
#include <variant>
#include <vector>

namespace precalq {

/// A named, row-major 2-D weight matrix. Every element must be finite.
struct WeightTensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  std::size_t size() const noexcept { return data.size(); }
  std::span<const float> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  /// Throws BadParam on a shape mismatch or empty dims, NonFinite on NaN/Inf.
  void validate() const;

  friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

WeightTensor make_tensor(std::string name, std::size_t rows, std::size_t cols,
                         std::vector<float> data);

struct TensorContainer {
  std::uint32_t format_version = 1;
  std::vector<WeightTensor> tensors;

  void validate() const;

  friend bool operator==(const TensorContainer&, const TensorContainer&) = default;
};

// WTS1 layout, little-endian throughout:
//   "WTS1" | u32 version | u32 tensor count
//   per tensor: u16 name length | name bytes | u8 dtype (0 = f32, 1 = f16)
//               | u32 rows | u32 cols | rows*cols raw elements
inline constexpr char kWtsMagic[4] = {'W', 'T', 'S', '1'};
inline constexpr std::uint32_t kWtsVersion = 1;

enum class DType : std::uint8_t { F32 = 0, F16 = 1 };

TensorContainer load_container(const std::filesystem::path& path);
TensorContainer parse_container(std::span<const std::uint8_t> bytes);

/// Serializes as f32. Writes to a sibling temp file first, so a failed save
/// never leaves a partial file at `path`.
void save_container(const TensorContainer& container, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_container(const TensorContainer& container,
                                              DType dtype = DType::F32);

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};
struct Laplace {
  double loc = 0.0;
  double scale = 1.0;
};
struct StudentT {
  double nu = 3.0;
  double scale = 1.0;
};
using Distribution = std::variant<Gaussian, Laplace, StudentT>;

/// Deterministic for a fixed (distribution, shape, seed). Throws BadParam.
WeightTensor gen_synthetic(const Distribution& dist, std::size_t rows, std::size_t cols,
                           std::uint64_t seed, std::string name = "synthetic");

}  // namespace precalq
