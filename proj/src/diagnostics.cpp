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

#include "precalq/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>

#include "detail.hpp"
#include "precalq/error.hpp"
#include "precalq/packing.hpp"

namespace precalq {

namespace {

inline std::size_t bin_of(float v, double lo, double width, std::size_t bins) {
  if (!(width > 0.0)) return 0;
  const double pos = (static_cast<double>(v) - lo) / width;
  return pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
}

}  // namespace

std::vector<std::uint64_t> histogram_counts(std::span<const float> samples, double lo, double hi,
                                            std::size_t bins) {
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::uint64_t> counts(bins, 0);
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) ++local[bin_of(samples[i], lo, width, bins)];
#pragma omp critical(precalq_histogram_merge)
    for (std::size_t b = 0; b < bins; ++b) counts[b] += local[b];
  }
  return counts;
}

double histogram_kl(std::span<const float> p_samples, std::span<const float> q_samples, std::size_t bins) {
  if (p_samples.empty() || q_samples.empty()) throw Error(Errc::EmptySamples, "histogram_kl needs two non-empty samples");
  if (bins < 2) throw Error(Errc::BadParam, "histogram_kl needs at least 2 bins");
  const auto [p_lo, p_hi] = std::minmax_element(p_samples.begin(), p_samples.end());
  const auto [q_lo, q_hi] = std::minmax_element(q_samples.begin(), q_samples.end());
  const double lo = std::min(*p_lo, *q_lo);
  const double hi = std::max(*p_hi, *q_hi);

  const auto pc = histogram_counts(p_samples, lo, hi, bins);
  const auto qc = histogram_counts(q_samples, lo, hi, bins);
  auto normalize = [&](const std::vector<std::uint64_t>& counts, double total) {
    std::vector<double> prob(bins);
    double sum = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      prob[b] = static_cast<double>(counts[b]) / total + kKlSmoothing;
      sum += prob[b];
    }
    for (auto& v : prob) v /= sum;
    return prob;
  };
  const auto p = normalize(pc, static_cast<double>(p_samples.size()));
  const auto q = normalize(qc, static_cast<double>(q_samples.size()));
  double kl = 0.0;
  for (std::size_t b = 0; b < bins; ++b) kl += p[b] * std::log(p[b] / q[b]);
  return kl;
}

double plugin_kl(std::span<const double> weights, std::span<const double> qweights,
                 const DensityModel& density_p, const DensityModel& density_q) {
  if (weights.size() != qweights.size()) throw Error(Errc::ShapeMismatch, "weights and qweights differ in length");
  double sum = 0.0;
  for (double qw : qweights) {
    const double fp = density_p.pdf(qw);
    const double fq = density_q.pdf(qw);
    if (!(fp > 0.0) || !(fq > 0.0)) throw Error(Errc::NonPositiveDensity, "density vanishes at a quantized weight");
    sum += fp * std::log(fq / fp);
  }
  return -sum;
}

double claim1_approx(const DensityModel& density, std::span<const double> weights,
                     std::span<const double> qweights, double mu_delta) {
  if (weights.size() != qweights.size()) throw Error(Errc::ShapeMismatch, "weights and qweights differ in length");
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    first += density.d1(weights[i]);
    second += density.d2(weights[i]) * (qweights[i] - weights[i]);
  }
  return mu_delta * first + mu_delta * second;
}

ClaimSample draw_claim_sample(double mean, double stddev, const ErrorModel& error, std::size_t n,
                              std::uint64_t seed) {
  // Separate streams so that the weights do not change with the error model.
  std::mt19937_64 weight_rng(seed);
  std::mt19937_64 error_rng(seed ^ 0x9E3779B97F4A7C15ull);
  std::normal_distribution<double> unit(0.0, 1.0);
  ClaimSample s;
  s.weights.resize(n);
  s.qweights.resize(n);
  for (auto& w : s.weights) w = mean + stddev * unit(weight_rng);
  for (std::size_t i = 0; i < n; ++i) {
    s.qweights[i] = s.weights[i] + error.mu_delta + error.sigma_delta * unit(error_rng);
  }
  return s;
}

Claim1Record verify_claim1(double mean, double stddev, const ErrorModel& error, std::size_t n,
                           std::uint64_t seed) {
  if (!(stddev > 0.0)) throw Error(Errc::BadParam, "density sd must be positive");
  if (!(error.sigma_delta >= 0.0)) throw Error(Errc::BadParam, "sigma_delta must be non-negative");
  if (std::fabs(error.mu_delta) > 0.1 * stddev || error.sigma_delta > 0.1 * stddev) {
    throw Error(Errc::BadScale, "quantization error must be within 0.1 of the density's scale");
  }
  const ClaimSample sample = draw_claim_sample(mean, stddev, error, n, seed);
  const auto& w = sample.weights;
  const auto& qw = sample.qweights;

  const DensityModel f_w = gaussian_density(mean, stddev);
  const DensityModel f_qw = gaussian_convolved(mean, stddev, error);
  Claim1Record rec;
  rec.mu_delta = error.mu_delta;
  rec.sigma_delta = error.sigma_delta;
  rec.n = n;
  rec.seed = seed;
  rec.plugin_kl = plugin_kl(w, qw, f_w, f_qw);
  rec.claim1_approx = claim1_approx(f_w, w, qw, error.mu_delta);
  rec.gap = std::fabs(rec.plugin_kl - rec.claim1_approx);
  return rec;
}

Claim2Result claim2_check(const DensityModel& density, std::span<const double> weights,
                          std::span<const double> qweights, double mu_delta) {
  if (weights.size() != qweights.size()) throw Error(Errc::ShapeMismatch, "weights and qweights differ in length");
  Claim2Result r;
  double weighted = 0.0;
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) throw Error(Errc::ZeroWeight, "adaptive penalty undefined at w = 0");
    const double f2 = density.d2(w);
    r.bound_a = std::max(r.bound_a, std::fabs(w));
    r.bound_b = std::max(r.bound_b, std::fabs(f2));
    weighted += f2 * (qweights[i] - w);
    ratio_sum += std::fabs(qweights[i] / w);
  }
  r.lhs = std::fabs(mu_delta * weighted);
  r.constant = std::fabs(mu_delta) * r.bound_a * r.bound_b;
  r.rhs = r.constant * (ratio_sum + 1.0);
  // Relative slack only absorbs summation rounding.
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

Claim2FuzzSummary fuzz_claim2(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size_dist(1, 256);
  std::uniform_int_distribution<int> bits_dist(2, 8);
  Claim2FuzzSummary summary;
  for (std::size_t t = 0; t < trials; ++t) {
    const double mean = -1.0 + 2.0 * u01(rng);
    const double sd = 0.05 + 1.95 * u01(rng);
    const double mu = (-0.1 + 0.2 * u01(rng)) * sd;
    const double sigma = 0.1 * sd * u01(rng);
    const std::size_t n = size_dist(rng);
    const DensityModel density = gaussian_density(mean, sd);

    ClaimSample s = draw_claim_sample(mean, sd, {mu, sigma}, n, rng());
    for (std::size_t i = 0; i < n; ++i) {
      if (s.weights[i] == 0.0) s.weights[i] = sd * 1e-3;
    }
    if (t % 2 == 1) {
      std::vector<float> values(s.weights.begin(), s.weights.end());
      const GroupQuant gq = quantize_group(values, bits_dist(rng));
      const auto restored = dequantize_group(gq.params, gq.codes);
      s.qweights.assign(restored.begin(), restored.end());
    }
    const Claim2Result r = claim2_check(density, s.weights, s.qweights, mu);
    ++summary.trials;
    summary.holds += r.holds ? 1 : 0;
    if (r.rhs > 0.0) summary.max_lhs_over_rhs = std::max(summary.max_lhs_over_rhs, r.lhs / r.rhs);
  }
  return summary;
}

double mse(const WeightTensor& a, const WeightTensor& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.data.size() != b.data.size()) {
    throw Error(Errc::ShapeMismatch, "mse operands differ in shape");
  }
  if (a.data.empty()) return 0.0;
  std::vector<double> row_sums(a.rows, 0.0);
  detail::parallel_for(static_cast<std::ptrdiff_t>(a.rows), [&](std::ptrdiff_t r) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * a.cols + c;
      const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
      s += d * d;
    }
    row_sums[r] = s;
  });
  double total = 0.0;
  for (double s : row_sums) total += s;
  return total / static_cast<double>(a.data.size());
}

MetricsReport report_tensor(const WeightTensor& original, const QuantizedTensor& q, std::size_t bins,
                            std::optional<double> wall_time_seconds) {
  const auto start = std::chrono::steady_clock::now();
  if (original.rows != q.rows || original.cols != q.cols) {
    throw Error(Errc::ShapeMismatch, "report: quantized tensor shape differs from original '" + original.name + "'");
  }
  const WeightTensor restored = dequantize_tensor(q);
  MetricsReport m;
  m.tensor = q.name;
  m.avg_bits_formula = avg_bits(q.config);
  m.measured_bits = measured_bits_per_weight(q);
  m.mse = mse(original, restored);
  m.kl_histogram = histogram_kl(original.data, restored.data, bins);
  m.salient_count = q.outliers.size();
  m.lambda_prime = q.lambda_prime;
  m.wall_time_seconds = wall_time_seconds.value_or(
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return m;
}

std::string to_json_line(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["tensor"] = r.tensor;
  j["avg_bits_formula"] = r.avg_bits_formula;
  j["measured_bits"] = r.measured_bits;
  j["mse"] = r.mse;
  j["kl_histogram"] = r.kl_histogram;
  j["salient_count"] = r.salient_count;
  j["lambda_prime"] = r.lambda_prime;
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j.dump();
}

}  // namespace precalq
