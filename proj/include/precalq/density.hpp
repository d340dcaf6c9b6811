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

#include <functional>
#include <string>

namespace precalq {

/// Analytic density with its first two derivatives.
struct DensityModel {
  std::string label;
  std::function<double(double)> pdf;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  double support_lo = 0.0;  // integration range that carries all but ~1e-9 of the mass
  double support_hi = 0.0;
};

/// Mean and standard deviation of an additive quantization error.
struct ErrorModel {
  double mu_delta = 0.0;
  double sigma_delta = 0.0;
};

DensityModel gaussian_density(double mean, double stddev);

/// Location-free Student-t with `nu` degrees of freedom scaled by `scale`.
DensityModel student_t_density(double nu, double scale);

/// Density of W + delta for W ~ N(mean, sd^2) and delta ~ N(mu, sigma^2).
DensityModel gaussian_convolved(double mean, double stddev, const ErrorModel& error);

struct DensityCheck {
  double mass = 0.0;               // integral of pdf over the support hint
  double max_rel_error_d1 = 0.0;   // vs central differences of pdf
  double max_rel_error_d2 = 0.0;
  bool ok = false;
};

/// Composite Simpson integration of pdf over the support hint, plus a
/// finite-difference comparison of d1/d2 at `probes` evenly spaced points.
DensityCheck check_density(const DensityModel& model, int probes = 100);

}  // namespace precalq
