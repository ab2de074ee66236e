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

#ifndef NPDS_DSP_FEATURES_HPP_
#define NPDS_DSP_FEATURES_HPP_

#include "npds/dsp/spectral.hpp"
#include "npds/eeg/recording.hpp"

namespace npds::dsp {

// Band powers below this are treated as absent signal.
inline constexpr double kPowerFloorUv2 = 1e-12;
// Added to the 14 Hz power before forming the drowsiness ratio.
inline constexpr double kRatioEpsilonUv2 = 1e-9;

// ln(P_alpha(right)) - ln(P_alpha(left)) using default Welch parameters.
// Throws Errc::kMissingChannel, Errc::kDegeneratePower.
double alpha_asymmetry(const eeg::EegRecording& rec,
                       const eeg::ChannelLabel& left,
                       const eeg::ChannelLabel& right);

inline constexpr double kDrowsinessWindowSeconds = 4.0;

struct DrowsinessIndex {
  double p4 = 0.0;   // 3.5-4.5 Hz band power, uV^2
  double p14 = 0.0;  // 13.5-14.5 Hz band power, uV^2
  double ratio = 0.0;
};

DrowsinessIndex drowsiness_index(const eeg::EegRecording& rec,
                                 const eeg::ChannelLabel& channel);

}  // namespace npds::dsp

#endif  // NPDS_DSP_FEATURES_HPP_
