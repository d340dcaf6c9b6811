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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precalq/density.hpp"
#include "precalq/quantizer.hpp"

namespace precalq {

inline constexpr std::size_t kDefaultKlBins = 2048;
inline constexpr double kKlSmoothing = 1e-10;

/// KL(p || q) between two empirical samples: shared equal-width bins over the
/// pooled [min, max], each normalized histogram smoothed by 1e-10 per bin and
/// renormalized. Throws EmptySamples, BadParam (bins < 2).
double histogram_kl(std::span<const float> p_samples, std::span<const float> q_samples,
                    std::size_t bins = kDefaultKlBins);

/// Counts over `bins` equal-width bins on [lo, hi] (last bin closed).
/// Parallel; matches reference::histogram_counts exactly.
std::vector<std::uint64_t> histogram_counts(std::span<const float> samples, double lo, double hi,
                                            std::size_t bins);

/// The sum-form plug-in divergence evaluated at the quantized weights:
///   -sum_i p(qw_i) * ln(q(qw_i) / p(qw_i)).
/// It is a sum, not a mean, so it grows with the number of weights.
/// Throws ShapeMismatch, NonPositiveDensity.
double plugin_kl(std::span<const double> weights, std::span<const double> qweights,
                 const DensityModel& density_p, const DensityModel& density_q);

/// mu * sum f'(w_i) + mu * sum f''(w_i) (qw_i - w_i).
double claim1_approx(const DensityModel& density, std::span<const double> weights,
                     std::span<const double> qweights, double mu_delta);

struct Claim1Record {
  double mu_delta = 0.0;
  double sigma_delta = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double plugin_kl = 0.0;
  double claim1_approx = 0.0;
  double gap = 0.0;  // |plugin_kl - claim1_approx|

  friend bool operator==(const Claim1Record&, const Claim1Record&) = default;
};

/// Paired weights and perturbed weights, qw_i = w_i + delta_i, with
/// w ~ N(mean, sd^2) and delta ~ N(mu, sigma^2) drawn from independent
/// streams seeded by `seed`.
struct ClaimSample {
  std::vector<double> weights;
  std::vector<double> qweights;
};
ClaimSample draw_claim_sample(double mean, double stddev, const ErrorModel& error, std::size_t n,
                              std::uint64_t seed);

/// Draws n weights from N(mean, sd^2), perturbs each by an independent
/// N(mu, sigma^2) error, and compares the plug-in divergence against the
/// closed-form convolved density with the two-term approximation.
/// Throws BadScale unless |mu| and sigma are at most 0.1 sd.
Claim1Record verify_claim1(double mean, double stddev, const ErrorModel& error, std::size_t n,
                           std::uint64_t seed);

struct Claim2Result {
  double lhs = 0.0;       // |mu * sum f''(w_i)(qw_i - w_i)|
  double rhs = 0.0;       // C * (sum |qw_i / w_i| + 1)
  double constant = 0.0;  // C = |mu| * A * B
  double bound_a = 0.0;   // A = max |w_i|
  double bound_b = 0.0;   // B = max |f''(w_i)|
  bool holds = false;
};

/// Evaluates both sides of the adaptive-LASSO bound. Throws ZeroWeight.
Claim2Result claim2_check(const DensityModel& density, std::span<const double> weights,
                          std::span<const double> qweights, double mu_delta);

struct Claim2FuzzSummary {
  std::size_t trials = 0;
  std::size_t holds = 0;
  double max_lhs_over_rhs = 0.0;
};

/// Randomized Gaussian densities, weight sets and mu values. Half of the
/// trials perturb the weights with small independent errors; the other half
/// use the output of the minmax group quantizer as qweights.
Claim2FuzzSummary fuzz_claim2(std::size_t trials, std::uint64_t seed);

/// Mean squared difference, accumulated per row and summed in row order so
/// the value is independent of the thread count. Throws ShapeMismatch.
double mse(const WeightTensor& a, const WeightTensor& b);

struct MetricsReport {
  std::string tensor;
  double avg_bits_formula = 0.0;
  double measured_bits = 0.0;
  double mse = 0.0;
  double kl_histogram = 0.0;
  std::size_t salient_count = 0;
  double lambda_prime = 0.0;
  double wall_time_seconds = 0.0;
};

/// `wall_time_seconds` is recorded as given when present, otherwise it is the
/// time spent building this report.
MetricsReport report_tensor(const WeightTensor& original, const QuantizedTensor& q,
                            std::size_t bins = kDefaultKlBins,
                            std::optional<double> wall_time_seconds = std::nullopt);

/// One JSON object, no trailing newline. Field names match MetricsReport.
std::string to_json_line(const MetricsReport& report);

}  // namespace precalq
