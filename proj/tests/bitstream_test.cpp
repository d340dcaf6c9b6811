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

#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "precalq/bitstream.hpp"
#include "precalq/error.hpp"

namespace precalq {
namespace {

TEST(BitWriter, MsbFirstWithinBytes) {
  BitWriter w;
  w.write(0b101, 3);
  w.write(0b1, 1);
  w.write(0b0011, 4);
  w.write(0b11, 2);
  const auto bytes = w.take();
  ASSERT_EQ(bytes.size(), 2u);
  EXPECT_EQ(bytes[0], 0b10110011);
  EXPECT_EQ(bytes[1], 0b11000000);
}

TEST(BitWriter, AlignPadsWithZeros) {
  BitWriter w;
  w.write(1, 1);
  w.align();
  EXPECT_EQ(w.bit_count(), 8u);
  w.align();
  EXPECT_EQ(w.bit_count(), 8u);
}

TEST(BitStream, RandomWidthsRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> width(1, 24);
  std::vector<std::pair<std::uint32_t, int>> items;
  BitWriter w;
  std::size_t bits = 0;
  for (int i = 0; i < 20000; ++i) {
    const int wd = width(rng);
    const auto v = static_cast<std::uint32_t>(rng()) & ((1u << wd) - 1);
    items.emplace_back(v, wd);
    w.write(v, wd);
    bits += wd;
  }
  EXPECT_EQ(w.bit_count(), bits);
  const auto bytes = w.take();
  EXPECT_EQ(bytes.size(), padded_bytes(bits));
  BitReader r(bytes);
  for (auto [v, wd] : items) ASSERT_EQ(r.read(wd), v);
}

TEST(BitReader, ReadingPastTheEndIsCorrupt) {
  const std::vector<std::uint8_t> one{0xFF};
  BitReader r(one);
  EXPECT_EQ(r.read(5), 0x1Fu);
  try {
    r.read(4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Corrupt);
  }
}

TEST(Leb128, KnownEncodings) {
  std::vector<std::uint8_t> out;
  leb128_append(out, 0);
  leb128_append(out, 127);
  leb128_append(out, 128);
  leb128_append(out, 624485);
  const std::vector<std::uint8_t> expect{0x00, 0x7F, 0x80, 0x01, 0xE5, 0x8E, 0x26};
  EXPECT_EQ(out, expect);
  std::size_t pos = 0;
  EXPECT_EQ(leb128_read(out, pos), 0u);
  EXPECT_EQ(leb128_read(out, pos), 127u);
  EXPECT_EQ(leb128_read(out, pos), 128u);
  EXPECT_EQ(leb128_read(out, pos), 624485u);
  EXPECT_EQ(pos, out.size());
  EXPECT_EQ(leb128_size(0), 1u);
  EXPECT_EQ(leb128_size(128), 2u);
  EXPECT_EQ(leb128_size(624485), 3u);
}

TEST(Leb128, TruncatedIsCorrupt) {
  const std::vector<std::uint8_t> bytes{0x80, 0x80};
  std::size_t pos = 0;
  EXPECT_THROW(leb128_read(bytes, pos), Error);
}

}  // namespace
}  // namespace precalq
