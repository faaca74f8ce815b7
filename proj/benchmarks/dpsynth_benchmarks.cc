//
// Copyright 2026 The dpsynth Authors.
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
//

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "benchmark/benchmark.h"
#include "dpsynth/dpsgd_trainer.h"
#include "dpsynth/mlp.h"
#include "dpsynth/privacy_accountant.h"
#include "dpsynth/synthesizer.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {
namespace {

// Adult-shaped table: 7 categorical, 6 numerical attributes, binary label.
TabularDataset MakeTable(std::size_t rows) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cat(0, 9);
  std::uniform_real_distribution<double> num(0.0, 100.0);
  std::string csv;
  for (int j = 0; j < 7; ++j) absl::StrAppend(&csv, "c", j, ",");
  for (int j = 0; j < 6; ++j) absl::StrAppend(&csv, "x", j, ",");
  csv += "y\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (int j = 0; j < 7; ++j) absl::StrAppend(&csv, "v", cat(rng), ",");
    for (int j = 0; j < 6; ++j) absl::StrAppend(&csv, static_cast<int>(num(rng)), ",");
    csv += rng() % 4 == 0 ? "pos\n" : "neg\n";
  }
  return *ParseCsv(csv);
}

void BM_ComputeEpsilon(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeEpsilon(36177, 256, 20, 0.97, 1e-5));
  }
}
BENCHMARK(BM_ComputeEpsilon)->Unit(benchmark::kMillisecond);

void BM_ComputeNoise(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeNoise(36177, 256, 20, {.epsilon = 3.0, .delta = 1e-5}));
  }
}
BENCHMARK(BM_ComputeNoise)->Unit(benchmark::kMillisecond);

void BM_PerExampleGradients(benchmark::State& state) {
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  const std::vector<int> hidden = {64, 64};
  MlpModel model = *MlpModel::Initialize(MakeArchitecture(76, hidden, 2), 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  RowMatrix x(batch, 76);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  std::vector<int> labels(static_cast<std::size_t>(batch));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(PerExampleGradients(model, x, labels));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_PerExampleGradients)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ColumnPermutation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ColumnPermutation(n, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ColumnPermutation)->Arg(45222)->Arg(135666)->Unit(benchmark::kMicrosecond);

void BM_ShuffleAttributes(benchmark::State& state) {
  const TabularDataset d = MakeTable(static_cast<std::size_t>(state.range(0)));
  const AttributeTable x = d.Attributes();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ShuffleAttributes(x, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ShuffleAttributes)->Arg(45222)->Unit(benchmark::kMillisecond);

void BM_Encode(benchmark::State& state) {
  const TabularDataset d = MakeTable(static_cast<std::size_t>(state.range(0)));
  const EncodingMap map = *FitEncoding(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Encode(d, map));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encode)->Arg(45222)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpsynth

BENCHMARK_MAIN();
