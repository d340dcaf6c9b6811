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

// Straight-line serial implementations of the parallel kernels. They exist to
// pin down the expected output in tests and as the baseline in benchmarks;
// production callers use the functions in quantizer.hpp / diagnostics.hpp.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "precalq/quantizer.hpp"

namespace precalq::reference {

QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantConfig& config);
WeightTensor dequantize_tensor(const QuantizedTensor& q);

/// Bin counts over `bins` equal-width bins spanning [lo, hi]; the last bin is
/// closed on the right.
std::vector<std::uint64_t> histogram_counts(std::span<const float> samples, double lo, double hi,
                                            std::size_t bins);

/// Row sums added in row order, as the parallel kernel does.
double mse(const WeightTensor& a, const WeightTensor& b);

}  // namespace precalq::reference
