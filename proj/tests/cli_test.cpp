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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "precalq/packing.hpp"
#include "precalq/quantizer.hpp"
#include "precalq/tensor_io.hpp"

namespace precalq {
namespace {

namespace fs = std::filesystem;

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns exit status plus stdout.
Run run(const std::string& args) {
  const std::string cmd = std::string(PRECALQ_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<nlohmann::json> lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("precalq_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }

  fs::path dir_;
};

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth " + path("a.wts") + " --dist laplace --rows 8 --cols 32 --seed 3").status, 0);
  ASSERT_EQ(run("synth " + path("b.wts") + " --dist laplace --rows 8 --cols 32 --seed 3").status, 0);
  EXPECT_EQ(load_container(path("a.wts")), load_container(path("b.wts")));
  EXPECT_EQ(load_container(path("a.wts")).tensors[0], gen_synthetic(Laplace{0, 1}, 8, 32, 3, "weight"));
}

TEST_F(Cli, SynthBadParamsFail) {
  EXPECT_EQ(run("synth " + path("x.wts") + " --dist student_t --nu 0").status, 1);
  EXPECT_FALSE(fs::exists(path("x.wts")));
  EXPECT_EQ(run("synth " + path("x.wts") + " --dist cauchy").status, 1);
}

TEST_F(Cli, QuantizeReportsPublishedAverageBits) {
  ASSERT_EQ(run("synth " + path("in.wts") + " --dist student_t --nu 3 --rows 64 --cols 256 --count 2").status, 0);
  const auto r = run("quantize --bits 4 --outlier-bits 4 --group 128 --alpha 0.08 " + path("in.wts") + " " +
                     path("out.pcq"));
  ASSERT_EQ(r.status, 0);
  const auto js = lines(r.out);
  ASSERT_EQ(js.size(), 2u);
  EXPECT_EQ(js[0]["tensor"], "weight.0");
  EXPECT_EQ(js[1]["tensor"], "weight.1");
  for (const auto& j : js) {
    EXPECT_NEAR(j["avg_bits_formula"].get<double>(), 4.81, 0.005);
    EXPECT_GE(j["kl_histogram"].get<double>(), -1e-12);
  }
  EXPECT_EQ(load_artifact(path("out.pcq")).size(), 2u);
}

TEST_F(Cli, AlphaZeroIsRtn) {
  ASSERT_EQ(run("synth " + path("in.wts") + " --rows 16 --cols 128").status, 0);
  ASSERT_EQ(run("quantize --alpha 0 " + path("in.wts") + " " + path("out.pcq")).status, 0);
  const auto t = load_container(path("in.wts")).tensors[0];
  EXPECT_EQ(load_artifact(path("out.pcq"))[0], rtn_baseline(t, 4, 128));
}

TEST_F(Cli, InvalidConfigFailsBeforeIo) {
  // The input does not exist; a config error must still be the reported failure.
  const auto r = run("quantize --alpha 1.5 " + path("missing.wts") + " " + path("out.pcq"));
  EXPECT_EQ(r.status, 1);
  EXPECT_FALSE(fs::exists(path("out.pcq")));
  const std::string cmd = std::string(PRECALQ_CLI_PATH) + " quantize --alpha 1.5 " + path("missing.wts") + " " +
                          path("out.pcq") + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  char buf[512] = {};
  const std::size_t n = fread(buf, 1, sizeof buf - 1, pipe);
  pclose(pipe);
  EXPECT_NE(std::string(buf, n).find("BadAlpha"), std::string::npos);
}

TEST_F(Cli, FailedQuantizeLeavesNoOutput) {
  TensorContainer c;
  c.tensors.push_back(make_tensor("ok", 1, 4, {0, 1, 2, 3}));
  c.tensors.push_back(make_tensor("huge", 1, 2, {-1e6f, 1e6f}));  // scale overflows binary16
  save_container(c, path("in.wts"));
  EXPECT_EQ(run("quantize " + path("in.wts") + " " + path("out.pcq")).status, 1);
  EXPECT_FALSE(fs::exists(path("out.pcq")));
  EXPECT_FALSE(fs::exists(path("out.pcq.partial")));
}

TEST_F(Cli, DequantizeRoundTrip) {
  ASSERT_EQ(run("synth " + path("in.wts") + " --rows 8 --cols 64").status, 0);
  ASSERT_EQ(run("quantize --alpha 0.1 --group 32 " + path("in.wts") + " " + path("q.pcq")).status, 0);
  ASSERT_EQ(run("dequantize " + path("q.pcq") + " " + path("back.wts")).status, 0);
  const auto q = load_artifact(path("q.pcq"));
  EXPECT_EQ(load_container(path("back.wts")).tensors[0], dequantize_tensor(q[0]));
}

TEST_F(Cli, ReportOnIdenticalLatticeInput) {
  std::vector<float> v(256);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5f * static_cast<float>(i % 16);
  TensorContainer c;
  c.tensors.push_back(make_tensor("lat", 2, 128, v));
  save_container(c, path("in.wts"));
  ASSERT_EQ(run("quantize " + path("in.wts") + " " + path("q.pcq")).status, 0);
  const auto r = run("report " + path("in.wts") + " " + path("q.pcq"));
  ASSERT_EQ(r.status, 0);
  const auto js = lines(r.out);
  ASSERT_EQ(js.size(), 1u);
  EXPECT_EQ(js[0]["mse"].get<double>(), 0.0);
  EXPECT_LT(std::fabs(js[0]["kl_histogram"].get<double>()), 1e-9);
}

TEST_F(Cli, ReportMissingFileFails) {
  EXPECT_EQ(run("report " + path("none.wts") + " " + path("none.pcq")).status, 1);
}

TEST_F(Cli, SweepCardinalityAndMonotoneSalientCount) {
  ASSERT_EQ(run("synth " + path("in.wts") + " --dist student_t --rows 32 --cols 256 --count 2").status, 0);
  const auto r = run("sweep " + path("in.wts") + " --alphas 0,0.05,0.08");
  ASSERT_EQ(r.status, 0);
  const auto js = lines(r.out);
  ASSERT_EQ(js.size(), 6u);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(js[3 * t]["salient_count"].get<std::size_t>(), 0u);
    EXPECT_LT(js[3 * t + 1]["salient_count"].get<std::size_t>(), js[3 * t + 2]["salient_count"].get<std::size_t>());
    EXPECT_DOUBLE_EQ(js[3 * t]["avg_bits_formula"].get<double>(), 4.25);
    EXPECT_NEAR(js[3 * t + 1]["avg_bits_formula"].get<double>(), 4.60, 0.005);
    EXPECT_NEAR(js[3 * t + 2]["avg_bits_formula"].get<double>(), 4.81, 0.005);
  }
}

TEST_F(Cli, SweepBitConfigs) {
  ASSERT_EQ(run("synth " + path("in.wts") + " --rows 8 --cols 128").status, 0);
  const auto r = run("sweep " + path("in.wts") + " --alphas 0.08,0.09 --bit-configs 3:4");
  ASSERT_EQ(r.status, 0);
  const auto js = lines(r.out);
  ASSERT_EQ(js.size(), 2u);
  EXPECT_EQ(js[0]["bits_common"], 3);
  EXPECT_NEAR(js[0]["avg_bits_formula"].get<double>(), 3.89, 0.005);
  EXPECT_NEAR(js[1]["avg_bits_formula"].get<double>(), 3.97, 0.005);
}

TEST_F(Cli, VerifyClaims) {
  const auto zero = run("verify-claims --mu 0 --sigma 0 --n 1000 --fuzz 0");
  ASSERT_EQ(zero.status, 0);
  EXPECT_EQ(lines(zero.out)[0]["gap"].get<double>(), 0.0);

  const auto r = run("verify-claims --mu 0.04 --sigma 0.02 --schedule 4 --fuzz 500 --seed 1");
  ASSERT_EQ(r.status, 0);
  double prev = INFINITY;
  bool fuzz_seen = false;
  for (const auto& j : lines(r.out)) {
    if (j["claim"] == "claim1") {
      EXPECT_LT(j["gap"].get<double>(), prev);
      prev = j["gap"].get<double>();
    } else if (j["claim"] == "claim2_fuzz") {
      fuzz_seen = true;
      EXPECT_TRUE(j["all_hold"].get<bool>());
    } else {
      EXPECT_TRUE(j["holds"].get<bool>());
    }
  }
  EXPECT_TRUE(fuzz_seen);
  EXPECT_EQ(run("verify-claims --mu 0.5").status, 1);  // BadScale
}

TEST_F(Cli, ThreadEnvDoesNotChangeOutput) {
  ASSERT_EQ(run("synth " + path("in.wts") + " --dist student_t --rows 64 --cols 256").status, 0);
  ASSERT_EQ(run("quantize --alpha 0.05 --clip 0.95 " + path("in.wts") + " " + path("a.pcq")).status, 0);
  ASSERT_EQ(run("quantize --alpha 0.05 --clip 0.95 " + path("in.wts") + " " + path("b.pcq")).status, 0);
  ::setenv("PRECALQ_THREADS", "1", 1);
  ASSERT_EQ(run("quantize --alpha 0.05 --clip 0.95 " + path("in.wts") + " " + path("c.pcq")).status, 0);
  ::unsetenv("PRECALQ_THREADS");
  EXPECT_EQ(load_artifact(path("a.pcq")), load_artifact(path("b.pcq")));
  EXPECT_EQ(load_artifact(path("a.pcq")), load_artifact(path("c.pcq")));
}

TEST_F(Cli, UnknownSubcommandFails) {
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("").status, 1);
}

}  // namespace
}  // namespace precalq
