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

#include "eagleson/esseen.hpp"
#include "eagleson/rng.hpp"
#include "eagleson/spectral.hpp"

using namespace eagleson;

static void BM_TwoSampleKolmogorov(benchmark::State& state) {
  const std::size_t n = state.range(0);
  SplitMix64 rng(1);
  std::vector<double> a(n), b(n);
  for (auto& v : a) v = rng.next_double();
  for (auto& v : b) v = rng.next_double();
  for (auto _ : state) benchmark::DoNotOptimize(kolmogorov_two_sample(a, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(2 * n));
}
BENCHMARK(BM_TwoSampleKolmogorov)->Arg(10000)->Arg(100000);

static void BM_ExactChainCf(benchmark::State& state) {
  InhomogeneousMarkovChain chain(2, {{0.9, 0.1, 0.1, 0.9}}, true, {0.5, 0.5});
  const auto obs = ObservableSequence::chain_table({{1.0, -1.0}}, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_cf_chain(chain, obs, nullptr, 256, 0.7));
}
BENCHMARK(BM_ExactChainCf);

static void BM_EsseenConstant(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(esseen_constant().c);
}
BENCHMARK(BM_EsseenConstant);

BENCHMARK_MAIN();
