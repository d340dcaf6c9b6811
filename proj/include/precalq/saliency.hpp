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
#include <span>
#include <vector>

#include "precalq/tensor_io.hpp"

namespace precalq {

/// Per-weight salient (outlier) / common classification of one tensor.
struct SaliencyMask {
  std::vector<bool> salient;   // aligned with WeightTensor::data
  double lambda_prime = 0.0;   // threshold on w^2 that produced the mask
  double alpha_requested = 0.0;
  std::size_t salient_count = 0;

  friend bool operator==(const SaliencyMask&, const SaliencyMask&) = default;
};

/// Adaptive-LASSO proximal step under identity pseudo-activations:
///   sign(w) * max(|w| - lambda'/|w|, 0).
/// At w == 0 the limit value 0 is returned.
double soft_threshold(double w, double lambda_prime) noexcept;

/// Same as soft_threshold but throws ZeroWeightWithPenalty when w == 0 and
/// lambda' > 0, for callers that must not silently take the limit.
double soft_threshold_strict(double w, double lambda_prime);

/// Number of salient weights for a fraction alpha of n: ceil(alpha * n),
/// with products within 1e-9 of an integer snapped to it first, so that
/// alpha = 0.07, n = 100 selects 7 rather than 8.
std::size_t salient_count_for(double alpha, std::size_t n);

/// Threshold lambda' such that exactly salient_count_for(alpha, n) weights
/// satisfy w^2 > lambda' after tie-breaking: the (k+1)-th largest w^2, or 0
/// when every weight is selected. Throws BadAlpha.
double lambda_for_alpha(const WeightTensor& tensor, double alpha);

/// Top-k weights by |w|; ties go to the lower flat index. No weight is
/// modified. Throws BadAlpha.
SaliencyMask select_salient(const WeightTensor& tensor, double alpha);

}  // namespace precalq
