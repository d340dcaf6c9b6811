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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "precalq/diagnostics.hpp"
#include "precalq/parallel.hpp"
#include "precalq/quantizer.hpp"
#include "precalq/reference.hpp"
#include "precalq/tensor_io.hpp"

namespace {

using namespace precalq;

QuantConfig bench_config() {
  QuantConfig c;
  c.alpha = 0.08;
  return c;
}

const WeightTensor& tensor_for(benchmark::State& state) {
  static WeightTensor cached;
  const auto rows = static_cast<std::size_t>(state.range(0));
  if (cached.rows != rows) cached = gen_synthetic(StudentT{3, 0.02}, rows, 4096, 1);
  return cached;
}

void BM_QuantizeSerial(benchmark::State& state) {
  const auto& t = tensor_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(reference::quantize_tensor(t, bench_config()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.size()));
}

void BM_QuantizeParallel(benchmark::State& state) {
  const auto& t = tensor_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(quantize_tensor(t, bench_config()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.size()));
}

void BM_DequantizeSerial(benchmark::State& state) {
  const auto q = quantize_tensor(tensor_for(state), bench_config());
  for (auto _ : state) benchmark::DoNotOptimize(reference::dequantize_tensor(q));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(q.size()));
}

void BM_DequantizeParallel(benchmark::State& state) {
  const auto q = quantize_tensor(tensor_for(state), bench_config());
  for (auto _ : state) benchmark::DoNotOptimize(dequantize_tensor(q));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(q.size()));
}

void BM_HistogramSerial(benchmark::State& state) {
  const auto& t = tensor_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(reference::histogram_counts(t.data, -1.0, 1.0, 2048));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.size()));
}

void BM_HistogramParallel(benchmark::State& state) {
  const auto& t = tensor_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(histogram_counts(t.data, -1.0, 1.0, 2048));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.size()));
}

BENCHMARK(BM_QuantizeSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuantizeParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DequantizeSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DequantizeParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
