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

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "precalq/error.hpp"
#include "precalq/parallel.hpp"

namespace {

using precalq::ClipScope;
using precalq::QuantConfig;

void add_config_flags(CLI::App* cmd, QuantConfig& config, std::optional<double>& clip, std::string& scope) {
  cmd->add_option("--bits", config.bits_common, "bits per common weight");
  cmd->add_option("--outlier-bits", config.bits_outlier, "bits per salient weight");
  cmd->add_option("--group", config.group_size, "group size (power of two)");
  cmd->add_option("--alpha", config.alpha, "salient fraction in [0, 1]");
  cmd->add_option("--clip", clip, "clip percentile for common weights, in (0.5, 1]");
  cmd->add_option("--clip-scope", scope, "per_group or per_tensor")
      ->check(CLI::IsMember({"per_group", "per_tensor"}));
}

void finish_config(QuantConfig& config, const std::optional<double>& clip, const std::string& scope) {
  config.clip_percentile = clip;
  config.clip_scope = scope == "per_tensor" ? ClipScope::PerTensor : ClipScope::PerGroup;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precalq: calibration-free weight quantization"};
  app.require_subcommand(1);

  precalq::cli::QuantizeArgs quantize;
  std::optional<double> q_clip;
  std::string q_scope = "per_group";
  std::uint64_t q_seed = 0;
  auto* q_cmd = app.add_subcommand("quantize", "quantize a WTS1 file into a PCQ1 artifact");
  q_cmd->add_option("input", quantize.input, "WTS1 input")->required();
  q_cmd->add_option("output", quantize.output, "PCQ1 output")->required();
  add_config_flags(q_cmd, quantize.config, q_clip, q_scope);
  q_cmd->add_option("--bins", quantize.bins, "histogram bins for the KL report");
  q_cmd->add_option("--seed", q_seed, "accepted for uniformity; quantization is deterministic");

  precalq::cli::DequantizeArgs dequantize;
  auto* d_cmd = app.add_subcommand("dequantize", "expand a PCQ1 artifact back to WTS1 float32");
  d_cmd->add_option("input", dequantize.input, "PCQ1 input")->required();
  d_cmd->add_option("output", dequantize.output, "WTS1 output")->required();

  precalq::cli::ReportArgs report;
  auto* r_cmd = app.add_subcommand("report", "compare an original WTS1 file with its PCQ1 artifact");
  r_cmd->add_option("original", report.original, "WTS1 original")->required();
  r_cmd->add_option("quantized", report.quantized, "PCQ1 artifact")->required();
  r_cmd->add_option("--bins", report.bins, "histogram bins for the KL report");

  precalq::cli::SweepArgs sweep;
  std::optional<double> s_clip;
  std::string s_scope = "per_group";
  auto* s_cmd = app.add_subcommand("sweep", "quantize under a grid of alphas and bit widths");
  s_cmd->add_option("input", sweep.input, "WTS1 input")->required();
  s_cmd->add_option("--alphas", sweep.alphas, "salient fractions")->delimiter(',')->required();
  s_cmd->add_option("--bit-configs", sweep.bit_configs, "bC:bO pairs")->delimiter(',');
  add_config_flags(s_cmd, sweep.base, s_clip, s_scope);
  s_cmd->add_option("--bins", sweep.bins, "histogram bins for the KL report");

  precalq::cli::VerifyClaimsArgs verify;
  auto* v_cmd = app.add_subcommand("verify-claims", "check the KL approximation and its bound on Gaussian data");
  v_cmd->add_option("--mean", verify.mean, "density mean");
  v_cmd->add_option("--sd", verify.stddev, "density standard deviation");
  v_cmd->add_option("--mu", verify.mu, "mean of the quantization error");
  v_cmd->add_option("--sigma", verify.sigma, "sd of the quantization error");
  v_cmd->add_option("--n", verify.n, "sample size");
  v_cmd->add_option("--seed", verify.seed, "RNG seed");
  v_cmd->add_option("--schedule", verify.schedule, "number of (mu, sigma) halvings to evaluate");
  v_cmd->add_option("--fuzz", verify.fuzz, "fuzzed bound trials (0 disables)");

  precalq::cli::SynthArgs synth;
  auto* y_cmd = app.add_subcommand("synth", "generate a synthetic WTS1 file");
  y_cmd->add_option("output", synth.output, "WTS1 output")->required();
  y_cmd->add_option("--dist", synth.dist, "gaussian, laplace or student_t")
      ->check(CLI::IsMember({"gaussian", "laplace", "student_t"}));
  y_cmd->add_option("--mean,--loc", synth.loc, "location");
  y_cmd->add_option("--std,--scale", synth.scale, "scale (sd for gaussian)");
  y_cmd->add_option("--nu", synth.nu, "student_t degrees of freedom");
  y_cmd->add_option("--rows", synth.rows, "rows");
  y_cmd->add_option("--cols", synth.cols, "cols");
  y_cmd->add_option("--seed", synth.seed, "RNG seed");
  y_cmd->add_option("--name", synth.name, "tensor name (suffixed .i when --count > 1)");
  y_cmd->add_option("--count", synth.count, "number of tensors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  precalq::apply_thread_env();
  try {
    if (*q_cmd) {
      finish_config(quantize.config, q_clip, q_scope);
      return precalq::cli::run_quantize(quantize, std::cout, std::cerr);
    }
    if (*d_cmd) return precalq::cli::run_dequantize(dequantize, std::cout, std::cerr);
    if (*r_cmd) return precalq::cli::run_report(report, std::cout, std::cerr);
    if (*s_cmd) {
      finish_config(sweep.base, s_clip, s_scope);
      if (sweep.bit_configs.empty()) {
        sweep.bit_configs.push_back(std::to_string(sweep.base.bits_common) + ":" +
                                    std::to_string(sweep.base.bits_outlier));
      }
      return precalq::cli::run_sweep(sweep, std::cout, std::cerr);
    }
    if (*v_cmd) return precalq::cli::run_verify_claims(verify, std::cout, std::cerr);
    if (*y_cmd) return precalq::cli::run_synth(synth, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "precalq: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
