// Copyright 2026 The prtriage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "prtriage/features.h"
#include "prtriage/gbdt.h"
#include "prtriage/labeling.h"
#include "prtriage/metrics.h"
#include "prtriage/rng.h"
#include "prtriage/synth.h"

namespace prtriage {
namespace {

std::vector<PullRequestRecord> Corpus(size_t n) {
  SynthParams p;
  p.n_prs = n;
  p.seed = 3;
  return GenerateCorpus(p);
}

void BM_ExtractT1(benchmark::State& state) {
  const auto records = Corpus(static_cast<size_t>(state.range(0)));
  const auto schema = FeatureSchema::Build(FeatureStage::kT1);
  for (auto _ : state) benchmark::DoNotOptimize(BuildFeatureMatrix(records, schema));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractT1)->Arg(1000)->Arg(10000);

void BM_RocAuc(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<size_t>(state.range(0));
  std::vector<double> s(n);
  std::vector<std::uint8_t> y(n);
  for (size_t i = 0; i < n; ++i) {
    s[i] = rng.Uniform();
    y[i] = rng.Bernoulli(0.2) ? 1 : 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(RocAuc(s, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

void BM_TrainGbdt(benchmark::State& state) {
  const auto records = Corpus(static_cast<size_t>(state.range(0)));
  const auto thresholds = FitHighCostThresholds(records, 0.8);
  const auto y = HighCostVector(LabelRecords(records, thresholds, LabelConfig{}));
  const auto x = BuildFeatureMatrix(records, FeatureSchema::Build(FeatureStage::kT0));
  GbdtParams params;
  params.n_trees = 50;
  for (auto _ : state) benchmark::DoNotOptimize(TrainGbdt(x, y, params));
}
BENCHMARK(BM_TrainGbdt)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace prtriage

BENCHMARK_MAIN();
