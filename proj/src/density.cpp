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

#include "precalq/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "precalq/error.hpp"

namespace precalq {

DensityModel gaussian_density(double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean)) throw Error(Errc::BadParam, "gaussian density needs sd > 0");
  const double norm = 1.0 / (stddev * std::sqrt(2.0 * std::numbers::pi));
  const double var = stddev * stddev;
  DensityModel m;
  m.label = "gaussian";
  m.pdf = [=](double x) {
    const double z = (x - mean) / stddev;
    return norm * std::exp(-0.5 * z * z);
  };
  m.d1 = [=](double x) {
    const double z = (x - mean) / stddev;
    return -norm * std::exp(-0.5 * z * z) * (x - mean) / var;
  };
  m.d2 = [=](double x) {
    const double u = x - mean;
    const double z = u / stddev;
    return norm * std::exp(-0.5 * z * z) * (u * u - var) / (var * var);
  };
  m.support_lo = mean - 12.0 * stddev;
  m.support_hi = mean + 12.0 * stddev;
  return m;
}

DensityModel student_t_density(double nu, double scale) {
  if (!(nu > 0.0) || !(scale > 0.0)) throw Error(Errc::BadParam, "student-t density needs nu > 0 and scale > 0");
  const double norm = std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) /
                      (std::sqrt(nu * std::numbers::pi) * scale);
  const double p = (nu + 1.0) / 2.0;
  // f(x) = norm * (1 + y^2/nu)^(-p), y = x / scale
  DensityModel m;
  m.label = "student_t";
  m.pdf = [=](double x) {
    const double y = x / scale;
    return norm * std::pow(1.0 + y * y / nu, -p);
  };
  m.d1 = [=](double x) {
    const double y = x / scale;
    const double b = 1.0 + y * y / nu;
    return norm * (-p) * std::pow(b, -p - 1.0) * (2.0 * y / nu) / scale;
  };
  m.d2 = [=](double x) {
    const double y = x / scale;
    const double b = 1.0 + y * y / nu;
    const double term1 = (p + 1.0) * std::pow(b, -p - 2.0) * (2.0 * y / nu) * (2.0 * y / nu);
    const double term2 = -std::pow(b, -p - 1.0) * (2.0 / nu);
    return norm * p * (term1 + term2) / (scale * scale);
  };
  // Polynomial tails: widen until the neglected mass is ~1e-9.
  const double tail = scale * std::pow(1e9, 1.0 / nu) * 4.0;
  m.support_lo = -tail;
  m.support_hi = tail;
  return m;
}

DensityModel gaussian_convolved(double mean, double stddev, const ErrorModel& error) {
  DensityModel m = gaussian_density(mean + error.mu_delta,
                                    std::sqrt(stddev * stddev + error.sigma_delta * error.sigma_delta));
  m.label = "gaussian_convolved";
  return m;
}

DensityCheck check_density(const DensityModel& model, int probes) {
  DensityCheck out;
  // Simpson on a grid fine enough for the narrow-core, wide-tail student-t
  // support: sinh-spaced nodes concentrate points near the centre.
  const double lo = model.support_lo;
  const double hi = model.support_hi;
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double stretch = std::asinh(half);
  const int panels = 200000;
  auto x_of = [&](double t) { return centre + std::sinh(t * stretch); };
  auto dx_of = [&](double t) { return std::cosh(t * stretch) * stretch; };
  double sum = 0.0;
  const double h = 2.0 / panels;
  for (int i = 0; i <= panels; ++i) {
    const double t = -1.0 + i * h;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * model.pdf(x_of(t)) * dx_of(t);
  }
  out.mass = sum * h / 3.0;

  // Probe the interior (the tails are where pdf values underflow).
  const double probe_lo = centre - std::min(half, 6.0 * std::max(1.0, half / 1e3));
  const double probe_hi = centre + (centre - probe_lo);
  for (int i = 0; i < probes; ++i) {
    const double x = probe_lo + (probe_hi - probe_lo) * (i + 0.5) / probes;
    const double e = 1e-5 * (probe_hi - probe_lo);
    const double fd1 = (model.pdf(x + e) - model.pdf(x - e)) / (2 * e);
    const double fd2 = (model.pdf(x + e) - 2 * model.pdf(x) + model.pdf(x - e)) / (e * e);
    // Relative to the local derivative magnitude, floored so that zero
    // crossings of f' and f'' do not blow up the ratio.
    const double floor = 1e-3 * model.pdf(x) + 1e-12;
    out.max_rel_error_d1 = std::max(out.max_rel_error_d1, std::fabs(model.d1(x) - fd1) / std::max(std::fabs(fd1), floor));
    out.max_rel_error_d2 = std::max(out.max_rel_error_d2, std::fabs(model.d2(x) - fd2) / std::max(std::fabs(fd2), floor));
  }
  out.ok = std::fabs(out.mass - 1.0) <= 1e-6 && out.max_rel_error_d1 <= 1e-4 && out.max_rel_error_d2 <= 1e-4;
  return out;
}

}  // namespace precalq
