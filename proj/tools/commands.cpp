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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>

#include <json.hpp>

#include "precalq/diagnostics.hpp"
#include "precalq/error.hpp"
#include "precalq/packing.hpp"

namespace precalq::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void remove_quietly(const std::string& path) {
  std::error_code ec;
  std::filesystem::remove(path, ec);
}

}  // namespace

int run_quantize(const QuantizeArgs& args, std::ostream& out, std::ostream& log) {
  args.config.validate();
  const TensorContainer input = load_container(args.input);

  std::vector<QuantizedTensor> quantized;
  std::vector<MetricsReport> reports;
  try {
    for (const auto& t : input.tensors) {
      const auto start = Clock::now();
      QuantizedTensor q = quantize_tensor(t, args.config);
      const double elapsed = seconds_since(start);
      reports.push_back(report_tensor(t, q, args.bins, elapsed));
      quantized.push_back(std::move(q));
    }
    save_artifact(quantized, args.output);
  } catch (...) {
    remove_quietly(args.output);
    throw;
  }
  for (const auto& r : reports) {
    out << to_json_line(r) << '\n';
    log << r.tensor << ": " << r.salient_count << " salient, avg bits " << r.avg_bits_formula
        << " (measured " << r.measured_bits << "), mse " << r.mse << ", kl " << r.kl_histogram << '\n';
  }
  log << "wrote " << quantized.size() << " tensor(s) to " << args.output << '\n';
  return 0;
}

int run_dequantize(const DequantizeArgs& args, std::ostream& /*out*/, std::ostream& log) {
  const auto quantized = load_artifact(args.input);
  TensorContainer container;
  for (const auto& q : quantized) container.tensors.push_back(dequantize_tensor(q));
  try {
    save_container(container, args.output);
  } catch (...) {
    remove_quietly(args.output);
    throw;
  }
  log << "wrote " << container.tensors.size() << " tensor(s) to " << args.output << '\n';
  return 0;
}

int run_report(const ReportArgs& args, std::ostream& out, std::ostream& log) {
  const TensorContainer original = load_container(args.original);
  const auto quantized = load_artifact(args.quantized);
  std::map<std::string, const QuantizedTensor*> by_name;
  for (const auto& q : quantized) by_name[q.name] = &q;
  for (const auto& t : original.tensors) {
    auto it = by_name.find(t.name);
    if (it == by_name.end()) throw Error(Errc::ShapeMismatch, "tensor '" + t.name + "' missing from " + args.quantized);
    const MetricsReport r = report_tensor(t, *it->second, args.bins);
    out << to_json_line(r) << '\n';
    log << r.tensor << ": mse " << r.mse << ", kl " << r.kl_histogram << '\n';
  }
  return 0;
}

int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& log) {
  std::vector<QuantConfig> configs;
  for (const auto& spec : args.bit_configs) {
    const auto colon = spec.find(':');
    QuantConfig c = args.base;
    try {
      c.bits_common = std::stoi(spec.substr(0, colon));
      c.bits_outlier = colon == std::string::npos ? c.bits_common : std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(Errc::BadBits, "bit config '" + spec + "' is not of the form bC:bO");
    }
    for (double a : args.alphas) {
      c.alpha = a;
      c.validate();
      configs.push_back(c);
    }
  }
  const TensorContainer input = load_container(args.input);
  for (const auto& t : input.tensors) {
    for (const auto& c : configs) {
      const auto start = Clock::now();
      const QuantizedTensor q = quantize_tensor(t, c);
      const MetricsReport r = report_tensor(t, q, args.bins, seconds_since(start));
      auto j = nlohmann::ordered_json::parse(to_json_line(r));
      j["bits_common"] = c.bits_common;
      j["bits_outlier"] = c.bits_outlier;
      j["group_size"] = c.group_size;
      j["alpha"] = c.alpha;
      out << j.dump() << '\n';
    }
    log << t.name << ": " << configs.size() << " configurations\n";
  }
  return 0;
}

int run_verify_claims(const VerifyClaimsArgs& args, std::ostream& out, std::ostream& log) {
  if (args.schedule < 1) throw Error(Errc::BadParam, "schedule must be >= 1");
  double mu = args.mu;
  double sigma = args.sigma;
  double previous_gap = 0.0;
  bool shrinking = true;
  for (int step = 0; step < args.schedule; ++step, mu /= 2, sigma /= 2) {
    const ErrorModel error{mu, sigma};
    const Claim1Record rec = verify_claim1(args.mean, args.stddev, error, args.n, args.seed);
    nlohmann::ordered_json j;
    j["claim"] = "claim1";
    j["mu_delta"] = rec.mu_delta;
    j["sigma_delta"] = rec.sigma_delta;
    j["n"] = rec.n;
    j["seed"] = rec.seed;
    j["plugin_kl"] = rec.plugin_kl;
    j["claim1_approx"] = rec.claim1_approx;
    j["gap"] = rec.gap;
    if (step > 0) {
      j["gap_ratio"] = previous_gap > 0.0 ? rec.gap / previous_gap : 0.0;
      shrinking = shrinking && rec.gap < previous_gap;
    }
    out << j.dump() << '\n';
    previous_gap = rec.gap;

    if (args.n > 0) {
      const ClaimSample sample = draw_claim_sample(args.mean, args.stddev, error, args.n, args.seed);
      bool any_zero = false;
      for (double w : sample.weights) any_zero = any_zero || w == 0.0;
      if (!any_zero) {
        const Claim2Result c2 = claim2_check(gaussian_density(args.mean, args.stddev), sample.weights,
                                             sample.qweights, mu);
        nlohmann::ordered_json k;
        k["claim"] = "claim2";
        k["mu_delta"] = mu;
        k["lhs"] = c2.lhs;
        k["rhs"] = c2.rhs;
        k["C"] = c2.constant;
        k["holds"] = c2.holds;
        out << k.dump() << '\n';
      }
    }
  }
  if (args.fuzz > 0) {
    const Claim2FuzzSummary s = fuzz_claim2(args.fuzz, args.seed);
    nlohmann::ordered_json j;
    j["claim"] = "claim2_fuzz";
    j["trials"] = s.trials;
    j["holds"] = s.holds;
    j["all_hold"] = s.holds == s.trials;
    j["max_lhs_over_rhs"] = s.max_lhs_over_rhs;
    out << j.dump() << '\n';
    log << "claim 2 held in " << s.holds << "/" << s.trials << " fuzzed cases\n";
  }
  if (args.schedule > 1) log << "claim 1 gap " << (shrinking ? "shrinks" : "does NOT shrink") << " along the schedule\n";
  return 0;
}

int run_synth(const SynthArgs& args, std::ostream& /*out*/, std::ostream& log) {
  Distribution dist;
  if (args.dist == "gaussian") {
    dist = Gaussian{args.loc, args.scale};
  } else if (args.dist == "laplace") {
    dist = Laplace{args.loc, args.scale};
  } else if (args.dist == "student_t") {
    dist = StudentT{args.nu, args.scale};
  } else {
    throw Error(Errc::BadParam, "unknown distribution '" + args.dist + "'");
  }
  if (args.count == 0) throw Error(Errc::BadParam, "count must be >= 1");
  TensorContainer c;
  for (std::size_t i = 0; i < args.count; ++i) {
    const std::string name = args.count == 1 ? args.name : args.name + "." + std::to_string(i);
    c.tensors.push_back(gen_synthetic(dist, args.rows, args.cols, args.seed + i, name));
  }
  save_container(c, args.output);
  log << "wrote " << args.count << " " << args.dist << " tensor(s) of " << args.rows << "x" << args.cols
      << " to " << args.output << '\n';
  return 0;
}

}  // namespace precalq::cli
