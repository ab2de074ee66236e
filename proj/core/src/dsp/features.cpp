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

#include "npds/dsp/features.hpp"

#include <cmath>

#include "npds/error.hpp"

namespace npds::dsp {
namespace {

double alpha_power(const eeg::EegRecording& rec, const eeg::ChannelLabel& label) {
  const auto x = rec.channel_as_double(label);
  return band_power(psd_welch(x, rec.sample_rate_hz()), bands::kAlpha);
}

}  // namespace

double alpha_asymmetry(const eeg::EegRecording& rec,
                       const eeg::ChannelLabel& left,
                       const eeg::ChannelLabel& right) {
  const double p_left = alpha_power(rec, left);
  const double p_right = alpha_power(rec, right);
  if (p_left < kPowerFloorUv2 || p_right < kPowerFloorUv2) {
    throw Error(Errc::kDegeneratePower,
                "alpha power below floor on " +
                    (p_left < kPowerFloorUv2 ? left : right));
  }
  return std::log(p_right) - std::log(p_left);
}

DrowsinessIndex drowsiness_index(const eeg::EegRecording& rec,
                                 const eeg::ChannelLabel& channel) {
  const auto x = rec.channel_as_double(channel);
  // 4 s segments keep the Hann main lobe (+-0.5 Hz) inside the 1 Hz bands.
  const auto psd = psd_welch(x, rec.sample_rate_hz(), kDrowsinessWindowSeconds);
  DrowsinessIndex out;
  out.p4 = band_power(psd, FrequencyBand{"drowsy-4hz", 3.5, 4.5});
  out.p14 = band_power(psd, FrequencyBand{"drowsy-14hz", 13.5, 14.5});
  out.ratio = out.p4 / (out.p14 + kRatioEpsilonUv2);
  return out;
}

}  // namespace npds::dsp
