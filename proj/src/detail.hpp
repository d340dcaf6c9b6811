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

// Internal helpers shared by the parallel kernels and the serial reference.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace precalq::detail {

inline float clamp_abs(float v, double t) noexcept {
  if (v > t) return static_cast<float>(t);
  if (v < -t) return static_cast<float>(-t);
  return v;
}

/// Linear interpolation at (n - 1) * p over an ascending sequence whose two
/// relevant order statistics are `lo_value` and `hi_value`.
inline double interpolate_order_stat(double lo_value, double hi_value, double h) noexcept {
  const double frac = h - std::floor(h);
  return lo_value + frac * (hi_value - lo_value);
}

/// abs_percentile via selection instead of a full sort. Reorders `scratch`,
/// which must already hold |v|.
inline double abs_percentile_select(std::vector<float>& scratch, double p) {
  const std::size_t n = scratch.size();
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(lo);
  std::nth_element(scratch.begin(), nth, scratch.end());
  const double lo_value = *nth;
  if (lo + 1 >= n) return lo_value;
  const double hi_value = *std::min_element(nth + 1, scratch.end());
  return interpolate_order_stat(lo_value, hi_value, h);
}

/// OpenMP loop over [0, n) that carries the first exception out of the
/// parallel region.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(precalq_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace precalq::detail
