/*
   Copyright 2026 the eagleson authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include <benchmark/benchmark.h>

#include "eagleson/models.hpp"
#include "eagleson/sums.hpp"

using namespace eagleson;

static void BM_MapPrefixSums(benchmark::State& state) {
  const ProcessModel model = SequentialExpandingMap({2, 3}, true);
  const auto obs = ObservableSequence::map_cos2pi();
  const std::size_t n = state.range(0);
  const std::size_t count = 4096;
  for (auto _ : state) {
    auto run = sample_prefix_sums(model, obs, nullptr, MeasureTag::Mu, count, {n},
                                  42, 1);
    benchmark::DoNotOptimize(run.sums.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(count * n));
}
BENCHMARK(BM_MapPrefixSums)->Arg(1024)->Arg(4096);

static void BM_MapNuRejectionSampling(benchmark::State& state) {
  const ProcessModel model = SequentialExpandingMap({2}, true);
  const auto obs = ObservableSequence::map_cos2pi();
  const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
  for (auto _ : state) {
    auto run = sample_prefix_sums(model, obs, &tilt, MeasureTag::Nu, 20000, {64},
                                  42, 1);
    benchmark::DoNotOptimize(run.initial.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 20000);
}
BENCHMARK(BM_MapNuRejectionSampling);

static void BM_ChainPrefixSums(benchmark::State& state) {
  const ProcessModel model = iid_sign_chain();
  const auto obs = ObservableSequence::chain_table({{1.0, -1.0}}, 1);
  for (auto _ : state) {
    auto run = sample_prefix_sums(model, obs, nullptr, MeasureTag::Mu, 4096,
                                  {1024}, 7, 1);
    benchmark::DoNotOptimize(run.sums.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 4096 *
                          1024);
}
BENCHMARK(BM_ChainPrefixSums);
