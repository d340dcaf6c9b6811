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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "precalq/quantizer.hpp"
#include "precalq/tensor_io.hpp"

namespace precalq::cli {

struct QuantizeArgs {
  std::string input;
  std::string output;
  QuantConfig config;
  std::size_t bins = 2048;
};

struct DequantizeArgs {
  std::string input;
  std::string output;
};

struct ReportArgs {
  std::string original;
  std::string quantized;
  std::size_t bins = 2048;
};

struct SweepArgs {
  std::string input;
  std::vector<double> alphas;
  std::vector<std::string> bit_configs;  // "bC:bO"
  QuantConfig base;
  std::size_t bins = 2048;
};

struct VerifyClaimsArgs {
  double mean = 0.0;
  double stddev = 1.0;
  double mu = 0.02;
  double sigma = 0.01;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  int schedule = 1;          // number of halvings of (mu, sigma), including the first
  std::size_t fuzz = 10000;  // claim-2 fuzz trials; 0 disables
};

struct SynthArgs {
  std::string output;
  std::string dist = "gaussian";
  double loc = 0.0;
  double scale = 1.0;
  double nu = 3.0;
  std::size_t rows = 128;
  std::size_t cols = 128;
  std::uint64_t seed = 0;
  std::string name = "weight";
  std::size_t count = 1;
};

// Each command writes JSONL to `out`, a human summary to `log`, and returns
// the process exit status. Library errors propagate as precalq::Error.
int run_quantize(const QuantizeArgs& args, std::ostream& out, std::ostream& log);
int run_dequantize(const DequantizeArgs& args, std::ostream& out, std::ostream& log);
int run_report(const ReportArgs& args, std::ostream& out, std::ostream& log);
int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& log);
int run_verify_claims(const VerifyClaimsArgs& args, std::ostream& out, std::ostream& log);
int run_synth(const SynthArgs& args, std::ostream& out, std::ostream& log);

}  // namespace precalq::cli
