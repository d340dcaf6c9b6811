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

#include "precalq/bitstream.hpp"

#include "precalq/error.hpp"

namespace precalq {

void BitWriter::write(std::uint32_t value, int width) {
  acc_ = (acc_ << width) | (value & ((std::uint64_t{1} << width) - 1));
  pending_ += width;
  while (pending_ >= 8) {
    pending_ -= 8;
    bytes_.push_back(static_cast<std::uint8_t>(acc_ >> pending_));
  }
  acc_ &= (std::uint64_t{1} << pending_) - 1;
}

void BitWriter::align() {
  if (pending_ > 0) {
    bytes_.push_back(static_cast<std::uint8_t>(acc_ << (8 - pending_)));
    acc_ = 0;
    pending_ = 0;
  }
}

std::vector<std::uint8_t> BitWriter::take() {
  align();
  return std::move(bytes_);
}

std::uint32_t BitReader::read(int width) {
  if (pos_ + static_cast<std::size_t>(width) > bytes_.size() * 8) {
    throw Error(Errc::Corrupt, "bitstream shorter than its declared contents");
  }
  std::uint32_t value = 0;
  for (int b = 0; b < width; ++b, ++pos_) {
    value = (value << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u);
  }
  return value;
}

void leb128_append(std::vector<std::uint8_t>& out, std::uint64_t value) {
  do {
    std::uint8_t byte = value & 0x7Fu;
    value >>= 7;
    if (value != 0) byte |= 0x80u;
    out.push_back(byte);
  } while (value != 0);
}

std::uint64_t leb128_read(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::uint64_t value = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= bytes.size()) throw Error(Errc::Corrupt, "truncated LEB128 value");
    const std::uint8_t byte = bytes[pos++];
    value |= static_cast<std::uint64_t>(byte & 0x7Fu) << shift;
    if ((byte & 0x80u) == 0) return value;
  }
  throw Error(Errc::Corrupt, "LEB128 value wider than 64 bits");
}

std::size_t leb128_size(std::uint64_t value) noexcept {
  std::size_t n = 1;
  while (value >>= 7) ++n;
  return n;
}

}  // namespace precalq
