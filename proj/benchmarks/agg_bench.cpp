/*
 * Copyright 2026 The npds Authors.
 *
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

#include <map>
#include <string>

#include "npds/agg/fixed_point.hpp"
#include "npds/agg/masking.hpp"

namespace {

using namespace npds;

void BM_DerivePairwiseMask(benchmark::State& state) {
  const auto seed = agg::random_pair_seed();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agg::derive_pairwise_mask(seed, "session-1", 0, 1));
  }
}
BENCHMARK(BM_DerivePairwiseMask);

void BM_ApplyPairwiseMasks(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::map<std::uint32_t, agg::PairSeed> seeds;
  for (std::uint32_t j = 1; j < n; ++j) seeds[j] = agg::random_pair_seed();
  const auto encoded = agg::encode_fixed(12.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(agg::apply_pairwise_masks(encoded, "session-1", 0, n, seeds));
  }
}
BENCHMARK(BM_ApplyPairwiseMasks)->Arg(3)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
