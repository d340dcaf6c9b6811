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

#include "precalq/packing.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include "precalq/bitstream.hpp"
#include "precalq/error.hpp"

namespace precalq {

double avg_bits(const QuantConfig& config) {
  config.validate();
  const double g = config.group_size;
  const double params = 2.0 * 16.0 / g;
  return (config.bits_common + params) * (1.0 - config.alpha) +
         (config.bits_outlier + std::log2(g) + params) * config.alpha;
}

namespace {

std::vector<std::uint64_t> outlier_counts_per_group(const QuantizedTensor& q) {
  std::vector<std::uint64_t> counts(q.group_count(), 0);
  for (const auto& rec : q.outliers) ++counts[rec.group_index];
  return counts;
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T read() {
    auto raw = take(sizeof(T));
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(Errc::Corrupt, "artifact truncated");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t& pos() { return pos_; }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_params(std::vector<std::uint8_t>& out, const std::vector<GroupParams>& params) {
  for (const auto& p : params) {
    put<std::uint16_t>(out, p.scale_bits);
    put<std::uint16_t>(out, p.offset_bits);
  }
}

std::vector<GroupParams> read_params(Cursor& in, std::size_t count) {
  auto raw = in.take(count * 4);
  std::vector<GroupParams> params(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::memcpy(&params[k].scale_bits, raw.data() + 4 * k, 2);
    std::memcpy(&params[k].offset_bits, raw.data() + 4 * k + 2, 2);
  }
  return params;
}

void pack_one(std::vector<std::uint8_t>& out, const QuantizedTensor& q) {
  q.validate();
  if (q.name.size() > 0xFFFF) throw Error(Errc::BadParam, "tensor name longer than 65535 bytes");
  if (q.rows > 0xFFFFFFFFu || q.cols > 0xFFFFFFFFu || q.size() > 0xFFFFFFFFu) {
    throw Error(Errc::BadParam, "tensor too large for PCQ1");
  }
  const auto& cfg = q.config;
  put<std::uint16_t>(out, static_cast<std::uint16_t>(q.name.size()));
  out.insert(out.end(), q.name.begin(), q.name.end());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(q.rows));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(q.cols));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.bits_common));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.bits_outlier));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.group_size));
  put<double>(out, cfg.alpha);
  put<std::uint8_t>(out, cfg.clip_percentile ? 1 : 0);
  put<double>(out, cfg.clip_percentile.value_or(1.0));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.clip_scope));
  put<double>(out, q.lambda_prime);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(q.common_group_params.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(q.outliers.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(q.outlier_group_params.size()));

  put_params(out, q.common_group_params);
  put_params(out, q.outlier_group_params);
  for (auto c : outlier_counts_per_group(q)) leb128_append(out, c);

  BitWriter outliers;
  for (const auto& rec : q.outliers) {
    outliers.write(rec.intra_index, cfg.index_bits());
    outliers.write(rec.code, cfg.bits_outlier);
  }
  auto stream = outliers.take();
  out.insert(out.end(), stream.begin(), stream.end());

  BitWriter common;
  for (auto c : q.common_codes) common.write(c, cfg.bits_common);
  stream = common.take();
  out.insert(out.end(), stream.begin(), stream.end());
}

QuantizedTensor unpack_one(Cursor& in) {
  QuantizedTensor q;
  const auto name_len = in.read<std::uint16_t>();
  auto name = in.take(name_len);
  q.name.assign(name.begin(), name.end());
  q.rows = in.read<std::uint32_t>();
  q.cols = in.read<std::uint32_t>();
  auto& cfg = q.config;
  cfg.bits_common = in.read<std::uint8_t>();
  cfg.bits_outlier = in.read<std::uint8_t>();
  cfg.group_size = static_cast<int>(in.read<std::uint32_t>());
  cfg.alpha = in.read<double>();
  const bool clip = in.read<std::uint8_t>() != 0;
  const double percentile = in.read<double>();
  if (clip) cfg.clip_percentile = percentile;
  const auto scope = in.read<std::uint8_t>();
  if (scope > 1) throw Error(Errc::Corrupt, "unknown clip scope");
  cfg.clip_scope = static_cast<ClipScope>(scope);
  q.lambda_prime = in.read<double>();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(Errc::Corrupt, std::string("config echo invalid: ") + e.what());
  }
  if (q.rows == 0 || q.cols == 0) throw Error(Errc::Corrupt, "empty tensor shape");

  const auto common_groups = in.read<std::uint32_t>();
  const auto outlier_count = in.read<std::uint32_t>();
  const auto outlier_groups = in.read<std::uint32_t>();
  const auto g = static_cast<std::size_t>(cfg.group_size);
  if (common_groups != q.group_count()) throw Error(Errc::Corrupt, "common group count inconsistent with shape");
  if (outlier_count > q.size()) throw Error(Errc::Corrupt, "more outliers than weights");
  if (outlier_groups != (outlier_count + g - 1) / g) throw Error(Errc::Corrupt, "outlier group count inconsistent");

  q.common_group_params = read_params(in, common_groups);
  q.outlier_group_params = read_params(in, outlier_groups);

  std::vector<std::uint64_t> counts(common_groups);
  std::uint64_t total = 0;
  for (auto& c : counts) {
    c = leb128_read(in.bytes(), in.pos());
    total += c;
  }
  if (total != outlier_count) throw Error(Errc::Corrupt, "per-group outlier counts do not sum to the outlier count");

  const std::size_t outlier_bits = outlier_count * static_cast<std::size_t>(cfg.index_bits() + cfg.bits_outlier);
  BitReader outliers(in.take(padded_bytes(outlier_bits)));
  q.outliers.reserve(outlier_count);
  for (std::uint32_t grp = 0; grp < common_groups; ++grp) {
    if (counts[grp] > q.group_width(grp)) throw Error(Errc::Corrupt, "group holds more outliers than positions");
    for (std::uint64_t k = 0; k < counts[grp]; ++k) {
      OutlierRecord rec;
      rec.group_index = grp;
      rec.intra_index = outliers.read(cfg.index_bits());
      rec.code = static_cast<std::uint8_t>(outliers.read(cfg.bits_outlier));
      q.outliers.push_back(rec);
    }
  }

  const std::size_t common_count = q.size() - outlier_count;
  BitReader common(in.take(padded_bytes(common_count * static_cast<std::size_t>(cfg.bits_common))));
  q.common_codes.resize(common_count);
  for (auto& c : q.common_codes) c = static_cast<std::uint8_t>(common.read(cfg.bits_common));

  try {
    q.validate();
  } catch (const Error& e) {
    throw Error(Errc::Corrupt, e.what());
  }
  return q;
}

}  // namespace

PayloadLayout payload_layout(const QuantizedTensor& q) {
  const auto& cfg = q.config;
  PayloadLayout layout;
  layout.common_params = q.common_group_params.size() * 4;
  layout.outlier_params = q.outlier_group_params.size() * 4;
  for (auto c : outlier_counts_per_group(q)) layout.outlier_counts += leb128_size(c);
  layout.outlier_stream = padded_bytes(q.outliers.size() * static_cast<std::size_t>(cfg.index_bits() + cfg.bits_outlier));
  layout.common_stream = padded_bytes(q.common_codes.size() * static_cast<std::size_t>(cfg.bits_common));
  return layout;
}

double measured_bits_per_weight(const QuantizedTensor& q) {
  return 8.0 * static_cast<double>(payload_layout(q).total()) / static_cast<double>(q.size());
}

std::vector<std::uint8_t> pack_artifact(std::span<const QuantizedTensor> tensors) {
  std::vector<std::uint8_t> out(kPcqMagic, kPcqMagic + 4);
  put<std::uint32_t>(out, kPcqVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& q : tensors) pack_one(out, q);
  return out;
}

std::vector<QuantizedTensor> unpack_artifact(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kPcqMagic, 4) != 0) {
    throw Error(Errc::BadMagic, "not a PCQ1 artifact");
  }
  Cursor in(bytes);
  in.take(4);
  const auto version = in.read<std::uint32_t>();
  if (version != kPcqVersion) throw Error(Errc::BadMagic, "unsupported PCQ1 version " + std::to_string(version));
  const auto count = in.read<std::uint32_t>();
  std::vector<QuantizedTensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) tensors.push_back(unpack_one(in));
  if (in.pos() != bytes.size()) throw Error(Errc::Corrupt, "trailing bytes after last tensor");
  return tensors;
}

std::vector<std::uint8_t> pack(const QuantizedTensor& q) { return pack_artifact(std::span(&q, 1)); }

QuantizedTensor unpack(std::span<const std::uint8_t> bytes) {
  auto tensors = unpack_artifact(bytes);
  if (tensors.size() != 1) throw Error(Errc::Corrupt, "expected a single-tensor artifact");
  return std::move(tensors.front());
}

void save_artifact(std::span<const QuantizedTensor> tensors, const std::filesystem::path& path) {
  const auto bytes = pack_artifact(tensors);
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(Errc::IoFailure, "short write to " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::IoFailure, "cannot move output into place at " + path.string());
  }
}

std::vector<QuantizedTensor> load_artifact(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return unpack_artifact(bytes);
}

}  // namespace precalq
