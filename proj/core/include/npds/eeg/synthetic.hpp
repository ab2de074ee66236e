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

#ifndef NPDS_EEG_SYNTHETIC_HPP_
#define NPDS_EEG_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "npds/eeg/recording.hpp"

namespace npds::eeg {

struct Sinusoid {
  double amplitude_uv = 0.0;
  double frequency_hz = 0.0;
  double phase_rad = 0.0;
};

// x[t] = sum_i coefficients[i] * x[t-1-i] + N(0, noise_stdev^2)
struct ArProcess {
  std::vector<double> coefficients;
  double noise_stdev = 1.0;
};

struct WhiteNoise {
  double stdev = 1.0;
};

// Piecewise-constant frequency: a sinusoid switched on only inside
// [start_s, end_s). Used to build non-stationary fixtures.
struct SinusoidSegment {
  Sinusoid sinusoid;
  double start_s = 0.0;
  double end_s = 0.0;
};

using SignalComponent =
    std::variant<Sinusoid, ArProcess, WhiteNoise, SinusoidSegment>;

struct ChannelSpec {
  ChannelLabel label;
  std::vector<SignalComponent> components;
};

struct SyntheticSpec {
  double sample_rate_hz = 128.0;
  std::size_t sample_count = 0;
  std::int64_t start_time_micros = 0;
  std::vector<ChannelSpec> channels;
  RecordingMetadata metadata;
  // Empty: derived from the seed and the generated samples.
  std::string recording_id;
};

inline constexpr std::size_t kArBurnInSamples = 1000;

// True when every root of 1 - sum a_i z^-i lies strictly inside the unit
// circle (Schur-Cohn step-down test).
bool is_stable_ar(std::span<const double> coefficients);

// Deterministic in (spec, seed). Each stochastic component draws from its own
// stream keyed by (seed, channel index, component index), so adding a channel
// does not perturb the others. Throws Errc::kUnstableArModel.
EegRecording generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Spec files reuse the metadata block syntax ("key\tvalue" lines):
//
//   sample_rate_hz  128
//   duration_s      60
//   channels        O2,CZ
//   O2.sin          10 10 0 ; 5 20 0       amplitude frequency phase
//   O2.ar           1.0 0.75 -0.5          noise_stdev a1 a2 ...
//   O2.noise        1.0
//   O2.segment      10 5 0 0 30            amplitude frequency phase start end
//   start_time_micros, id, meta.user, meta.description, meta.battery,
//   meta.lat, meta.lon, meta.<extra>
//
// Throws Errc::kBadSpec.
SyntheticSpec parse_synthetic_spec(std::string_view text);

}  // namespace npds::eeg

#endif  // NPDS_EEG_SYNTHETIC_HPP_
