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

#include <cmath>
#include <numbers>
#include <random>

#include "npds/dsp/fingerprint.hpp"
#include "npds/dsp/ica.hpp"
#include "npds/dsp/spectral.hpp"
#include "npds/eeg/synthetic.hpp"

namespace {

using namespace npds;

eeg::EegRecording ar_recording(double seconds) {
  eeg::SyntheticSpec s;
  s.sample_rate_hz = 128;
  s.sample_count = static_cast<std::size_t>(128 * seconds);
  s.channels = {{"O2", {eeg::ArProcess{{0.75, -0.5}, 1.0}}},
                {"F3", {eeg::Sinusoid{10, 10, 0}, eeg::WhiteNoise{2}}}};
  return eeg::generate_synthetic(s, 1);
}

void BM_PsdWelch(benchmark::State& state) {
  const auto x = ar_recording(static_cast<double>(state.range(0))).channel_as_double(0);
  for (auto _ : state) benchmark::DoNotOptimize(dsp::psd_welch(x, 128.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_PsdWelch)->Arg(8)->Arg(60)->Arg(600);

void BM_YuleWalker(benchmark::State& state) {
  const auto x = ar_recording(60).channel_as_double(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::yule_walker(x, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_YuleWalker)->Arg(2)->Arg(6)->Arg(12);

void BM_ArFingerprint(benchmark::State& state) {
  const auto rec = ar_recording(60);
  for (auto _ : state) benchmark::DoNotOptimize(dsp::ar_fingerprint(rec));
}
BENCHMARK(BM_ArFingerprint);

void BM_FastIca(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd s(2, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    s(0, t) = std::sin(2.0 * std::numbers::pi * 5.0 * static_cast<double>(t) / 128.0);
    s(1, t) = u(rng);
  }
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.5, 0.5, 1.0;
  const Eigen::MatrixXd x = a * s;
  for (auto _ : state) benchmark::DoNotOptimize(dsp::fastica(x));
}
BENCHMARK(BM_FastIca)->Arg(2560)->Arg(25600);

}  // namespace
