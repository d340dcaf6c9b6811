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
#include <span>
#include <vector>

namespace precalq {

/// Appends fixed-width fields MSB-first within each byte.
class BitWriter {
 public:
  void write(std::uint32_t value, int width);
  /// Pads the current partial byte with zero bits.
  void align();
  std::size_t bit_count() const noexcept { return bytes_.size() * 8 + static_cast<std::size_t>(pending_); }
  /// Aligns, then hands over the buffer.
  std::vector<std::uint8_t> take();

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t acc_ = 0;
  int pending_ = 0;  // bits in acc_ not yet flushed, always < 8 between calls
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  /// Throws Corrupt when reading past the end.
  std::uint32_t read(int width);
  std::size_t bit_position() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline std::size_t padded_bytes(std::size_t bits) noexcept { return (bits + 7) / 8; }

void leb128_append(std::vector<std::uint8_t>& out, std::uint64_t value);
/// Decodes one value at `pos` and advances it. Throws Corrupt on truncation
/// or a value wider than 64 bits.
std::uint64_t leb128_read(std::span<const std::uint8_t> bytes, std::size_t& pos);
std::size_t leb128_size(std::uint64_t value) noexcept;

}  // namespace precalq
