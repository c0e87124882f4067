/*
 * Copyright 2026 The snapgap Authors.
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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "snapgap/calibration.h"
#include "snapgap/labeling.h"
#include "snapgap/logistic.h"
#include "snapgap/metrics.h"
#include "snapgap/synthetic.h"
#include "snapgap/trees.h"

namespace snapgap {
namespace {

struct Cohort {
  FeatureMatrix x;
  std::vector<int> y;
  std::vector<double> scores;
};

Cohort MakeCohort(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Cohort c{FeatureMatrix(n, 4), std::vector<int>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double z = -3.0;
    for (std::size_t j = 0; j < 4; ++j) {
      c.x(i, j) = normal(rng);
      z += (j == 0 ? -0.8 : 0.1) * c.x(i, j);
    }
    c.scores[i] = Sigmoid(z);
    c.y[i] = unit(rng) < c.scores[i];
  }
  c.y[0] = 1;
  c.y[1] = 0;
  return c;
}

void BM_RocAuc(benchmark::State& state) {
  const Cohort c = MakeCohort(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(RocAuc(c.scores, c.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Range(1 << 10, 1 << 16);

void BM_AveragePrecision(benchmark::State& state) {
  const Cohort c = MakeCohort(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(AveragePrecision(c.scores, c.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AveragePrecision)->Range(1 << 10, 1 << 16);

void BM_FitIsotonic(benchmark::State& state) {
  const Cohort c = MakeCohort(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(FitIsotonic(c.scores, c.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitIsotonic)->Range(1 << 10, 1 << 16);

void BM_FitLogistic(benchmark::State& state) {
  const Cohort c = MakeCohort(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(FitLogistic(c.x, c.y, LogisticParams{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitLogistic)->Range(1 << 10, 1 << 15)->Unit(benchmark::kMillisecond);

void BM_FitForest(benchmark::State& state) {
  const Cohort c = MakeCohort(state.range(0));
  TreeParams p;
  p.n_trees = 50;
  p.max_depth = 6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitTreeEnsemble(EnsembleKind::kRandomForest, c.x, c.y, p));
  }
}
BENCHMARK(BM_FitForest)->Range(1 << 10, 1 << 13)->Unit(benchmark::kMillisecond);

void BM_FitBoosting(benchmark::State& state) {
  const Cohort c = MakeCohort(state.range(0));
  TreeParams p;
  p.n_trees = 50;
  p.max_depth = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitTreeEnsemble(EnsembleKind::kGradientBoosting, c.x, c.y, p));
  }
}
BENCHMARK(BM_FitBoosting)->Range(1 << 10, 1 << 13)->Unit(benchmark::kMillisecond);

void BM_BuildLabels(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_zips = state.range(0);
  spec.first_year = spec.last_year = 2018;
  const auto panel = GenerateSynthetic(spec);
  for (auto _ : state) benchmark::DoNotOptimize(BuildLabels(panel.records, LabelConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildLabels)->Range(1 << 10, 1 << 15);

}  // namespace
}  // namespace snapgap

BENCHMARK_MAIN();
