/*
 * Copyright 2026 The Eclipse Detector Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Serial reference versus OpenMP for the three parallel kernels: theory grid
// scans, bootstrap resampling and per-example feature extraction.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "eclipse/eval.hpp"
#include "eclipse/metrics.hpp"
#include "eclipse/pipeline.hpp"
#include "eclipse/theory.hpp"

namespace eclipse {
namespace {

Exec ExecOf(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel;
}

void BM_CurvatureScan(benchmark::State& state) {
  const ObjectiveParams p;
  for (auto _ : state) {
    auto cert = CertifyConvexity(p, -4.0, 6.0, 1000000, ExecOf(state));
    benchmark::DoNotOptimize(cert.min_second_derivative);
  }
}
BENCHMARK(BM_CurvatureScan)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_CubicGrid(benchmark::State& state) {
  for (auto _ : state) {
    auto m = MaxCubicTerm(1000000, ExecOf(state));
    benchmark::DoNotOptimize(m.grid_max);
  }
}
BENCHMARK(BM_CubicGrid)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_Bootstrap(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<double> scores(200);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    y[i] = i % 2;
    scores[i] = normal(gen) + y[i];
  }
  for (auto _ : state) {
    auto ci = Bootstrap(scores, y, 1000, 42, RocAuc, ExecOf(state));
    benchmark::DoNotOptimize(ci.lo);
  }
}
BENCHMARK(BM_Bootstrap)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_Extraction(benchmark::State& state) {
  RunConfig config;
  const Lexicon lexicon = LoadLexicon(config);
  const auto examples = LoadOrBuildDataset(config, lexicon);
  auto backend = MakeBackend(config, examples);
  ExtractionOptions options = ExtractionOptionsFor(config);
  options.exec = ExecOf(state);
  for (auto _ : state) {
    auto result = ExtractAllFeatures(examples, *backend, lexicon, options);
    benchmark::DoNotOptimize(result.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(examples.size()));
}
BENCHMARK(BM_Extraction)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace eclipse

BENCHMARK_MAIN();
