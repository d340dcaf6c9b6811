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

#include "precalq/saliency.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "precalq/error.hpp"

namespace precalq {

double soft_threshold(double w, double lambda_prime) noexcept {
  if (lambda_prime == 0.0) return w;
  if (w == 0.0) return 0.0;
  const double mag = std::fabs(w) - lambda_prime / std::fabs(w);
  return mag > 0.0 ? std::copysign(mag, w) : 0.0;
}

double soft_threshold_strict(double w, double lambda_prime) {
  if (w == 0.0 && lambda_prime > 0.0) {
    throw Error(Errc::ZeroWeightWithPenalty, "soft threshold undefined at w = 0 with lambda' > 0");
  }
  return soft_threshold(w, lambda_prime);
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(Errc::BadAlpha, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

// Sort key: larger key == larger |w|, then lower index. |w| as f32 bits is
// monotone for non-negative floats; the index is complemented so lower wins.
inline std::uint64_t rank_key(float w, std::size_t index) {
  const std::uint32_t mag = std::bit_cast<std::uint32_t>(std::fabs(w));
  return (static_cast<std::uint64_t>(mag) << 32) | (0xFFFFFFFFull - index);
}

inline std::size_t key_index(std::uint64_t key) { return 0xFFFFFFFFull - (key & 0xFFFFFFFFull); }

struct Selection {
  std::vector<std::uint64_t> keys;  // first k entries are the selected set
  std::size_t k = 0;
  double lambda_prime = 0.0;
};

Selection select(const WeightTensor& tensor, double alpha) {
  check_alpha(alpha);
  tensor.validate();
  const std::size_t n = tensor.size();
  if (n > 0xFFFFFFFFull) throw Error(Errc::BadParam, "tensor too large for saliency ranking");

  Selection s;
  s.k = salient_count_for(alpha, n);
  s.keys.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.keys[i] = rank_key(tensor.data[i], i);

  if (s.k < n) {
    // Single order statistic: element k in descending order is the first
    // unselected weight, and its square is the threshold.
    std::nth_element(s.keys.begin(), s.keys.begin() + static_cast<std::ptrdiff_t>(s.k), s.keys.end(),
                     std::greater<>());
    const double w = tensor.data[key_index(s.keys[s.k])];
    s.lambda_prime = w * w;
  } else {
    s.lambda_prime = 0.0;
  }
  return s;
}

}  // namespace

std::size_t salient_count_for(double alpha, std::size_t n) {
  check_alpha(alpha);
  const double product = alpha * static_cast<double>(n);
  const double nearest = std::nearbyint(product);
  const double snapped = std::fabs(product - nearest) <= 1e-9 ? nearest : product;
  return std::min(n, static_cast<std::size_t>(std::ceil(snapped)));
}

double lambda_for_alpha(const WeightTensor& tensor, double alpha) {
  return select(tensor, alpha).lambda_prime;
}

SaliencyMask select_salient(const WeightTensor& tensor, double alpha) {
  Selection s = select(tensor, alpha);
  SaliencyMask mask;
  mask.salient.assign(tensor.size(), false);
  for (std::size_t i = 0; i < s.k; ++i) mask.salient[key_index(s.keys[i])] = true;
  mask.lambda_prime = s.lambda_prime;
  mask.alpha_requested = alpha;
  mask.salient_count = s.k;
  return mask;
}

}  // namespace precalq
