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

#include "precalq/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <system_error>

#include "precalq/error.hpp"
#include "precalq/half.hpp"

namespace precalq {

namespace {

static_assert(std::endian::native == std::endian::little,
              "byte-order handling assumes a little-endian host");

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T read() {
    T value{};
    need(sizeof(T));
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(Errc::TruncatedFile, "declared sizes exceed file length");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

}  // namespace

void WeightTensor::validate() const {
  if (rows == 0 || cols == 0) throw Error(Errc::BadParam, "tensor '" + name + "' has an empty dimension");
  if (data.size() != rows * cols) {
    throw Error(Errc::BadParam, "tensor '" + name + "' data length does not match rows*cols");
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "tensor '" + name + "' contains NaN/Inf");
  }
}

WeightTensor make_tensor(std::string name, std::size_t rows, std::size_t cols,
                         std::vector<float> data) {
  WeightTensor t{std::move(name), rows, cols, std::move(data)};
  t.validate();
  return t;
}

void TensorContainer::validate() const {
  std::set<std::string> seen;
  for (const auto& t : tensors) {
    t.validate();
    if (!seen.insert(t.name).second) throw Error(Errc::DuplicateName, "duplicate tensor name '" + t.name + "'");
  }
}

TensorContainer parse_container(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kWtsMagic, 4) != 0) {
    throw Error(Errc::BadMagic, "not a WTS1 file");
  }
  in.take(4);
  TensorContainer c;
  c.format_version = in.read<std::uint32_t>();
  if (c.format_version != kWtsVersion) {
    throw Error(Errc::BadMagic, "unsupported WTS1 version " + std::to_string(c.format_version));
  }
  const auto count = in.read<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    WeightTensor t;
    const auto name_len = in.read<std::uint16_t>();
    auto name = in.take(name_len);
    t.name.assign(name.begin(), name.end());
    const auto dtype = in.read<std::uint8_t>();
    t.rows = in.read<std::uint32_t>();
    t.cols = in.read<std::uint32_t>();
    const std::size_t n = t.rows * t.cols;
    if (dtype == static_cast<std::uint8_t>(DType::F32)) {
      auto raw = in.take(n * sizeof(float));
      t.data.resize(n);
      std::memcpy(t.data.data(), raw.data(), raw.size());
    } else if (dtype == static_cast<std::uint8_t>(DType::F16)) {
      auto raw = in.take(n * sizeof(std::uint16_t));
      t.data.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        std::uint16_t h;
        std::memcpy(&h, raw.data() + 2 * k, 2);
        t.data[k] = half_bits_to_float(h);
      }
    } else {
      throw Error(Errc::BadParam, "unknown dtype tag " + std::to_string(dtype));
    }
    c.tensors.push_back(std::move(t));
  }
  c.validate();
  return c;
}

TensorContainer load_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_container(bytes);
}

std::vector<std::uint8_t> serialize_container(const TensorContainer& container, DType dtype) {
  container.validate();
  std::vector<std::uint8_t> out(kWtsMagic, kWtsMagic + 4);
  put<std::uint32_t>(out, container.format_version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(container.tensors.size()));
  for (const auto& t : container.tensors) {
    if (t.name.size() > 0xFFFF) throw Error(Errc::BadParam, "tensor name longer than 65535 bytes");
    if (t.rows > 0xFFFFFFFFu || t.cols > 0xFFFFFFFFu) throw Error(Errc::BadParam, "tensor dims exceed u32");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(dtype));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols));
    if (dtype == DType::F32) {
      const auto* raw = reinterpret_cast<const std::uint8_t*>(t.data.data());
      out.insert(out.end(), raw, raw + t.data.size() * sizeof(float));
    } else {
      for (float v : t.data) put<std::uint16_t>(out, half_bits_from_double(v));
    }
  }
  return out;
}

void save_container(const TensorContainer& container, const std::filesystem::path& path) {
  const auto bytes = serialize_container(container);
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

namespace {

struct Sampler {
  std::mt19937_64& rng;

  float operator()(const Gaussian& g) const {
    std::normal_distribution<double> d(g.mean, g.stddev);
    return static_cast<float>(d(rng));
  }
  float operator()(const Laplace& l) const {
    // Inverse CDF on u in (-1/2, 1/2).
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng) - 0.5;
    while (std::fabs(u) >= 0.5) u = u01(rng) - 0.5;
    const double s = u < 0 ? -1.0 : 1.0;
    return static_cast<float>(l.loc - l.scale * s * std::log1p(-2.0 * std::fabs(u)));
  }
  float operator()(const StudentT& t) const {
    std::student_t_distribution<double> d(t.nu);
    return static_cast<float>(t.scale * d(rng));
  }
};

void check_params(const Distribution& dist) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  std::visit(
      [&](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Gaussian>) {
          if (!std::isfinite(d.mean) || !positive(d.stddev)) throw Error(Errc::BadParam, "gaussian needs finite mean and sigma > 0");
        } else if constexpr (std::is_same_v<D, Laplace>) {
          if (!std::isfinite(d.loc) || !positive(d.scale)) throw Error(Errc::BadParam, "laplace needs finite loc and b > 0");
        } else {
          if (!positive(d.nu) || !positive(d.scale)) throw Error(Errc::BadParam, "student_t needs nu > 0 and scale > 0");
        }
      },
      dist);
}

}  // namespace

WeightTensor gen_synthetic(const Distribution& dist, std::size_t rows, std::size_t cols,
                           std::uint64_t seed, std::string name) {
  if (rows == 0 || cols == 0) throw Error(Errc::BadParam, "rows and cols must be >= 1");
  check_params(dist);
  std::mt19937_64 rng(seed);
  Sampler sample{rng};
  WeightTensor t{std::move(name), rows, cols, std::vector<float>(rows * cols)};
  for (auto& v : t.data) {
    // Heavy tails can exceed f32 range for tiny nu; redraw rather than store Inf.
    do {
      v = std::visit(sample, dist);
    } while (!std::isfinite(v));
  }
  return t;
}

}  // namespace precalq
