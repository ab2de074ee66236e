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

#ifndef NPDS_DSP_SPECTRAL_HPP_
#define NPDS_DSP_SPECTRAL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace npds::dsp {

inline constexpr double kDefaultWindowSeconds = 2.0;
inline constexpr double kDefaultOverlap = 0.5;

// One-sided power spectral density in uV^2/Hz.
struct PsdEstimate {
  std::vector<double> frequencies_hz;
  std::vector<double> power;
  double resolution_hz = 0.0;
  double window_seconds = 0.0;
  double overlap_fraction = 0.0;
  std::size_t segments = 0;

  // Rectangle-rule integral over all bins; equals the mean-removed signal
  // variance for stationary input.
  double total_power() const;
  // Frequency of the largest bin.
  double peak_frequency() const;
};

struct FrequencyBand {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

namespace bands {
inline const FrequencyBand kDelta{"delta", 0.5, 4.0};
inline const FrequencyBand kTheta{"theta", 4.0, 8.0};
inline const FrequencyBand kAlpha{"alpha", 8.0, 13.0};
inline const FrequencyBand kBeta{"beta", 13.0, 30.0};
inline const FrequencyBand kGamma{"gamma", 30.0, 45.0};
}  // namespace bands

// Named band lookup ("delta", ..., "gamma"); throws Errc::kBandOutOfRange for
// unknown names.
FrequencyBand standard_band(const std::string& name);

// Welch estimate: periodic Hann windows of round(window_seconds * fs) samples,
// per-segment mean removal, segments advanced by the window length times
// (1 - overlap_fraction), density scaling 1 / (fs * sum(w^2)), one-sided.
// Throws Errc::kSignalTooShort, Errc::kInvalidArgument.
PsdEstimate psd_welch(std::span<const double> signal, double sample_rate_hz,
                      double window_seconds = kDefaultWindowSeconds,
                      double overlap_fraction = kDefaultOverlap);

// Trapezoidal integral of the PSD over [low_hz, high_hz], interpolating
// linearly at band edges that fall between bins. Throws Errc::kBandOutOfRange.
double band_power(const PsdEstimate& psd, const FrequencyBand& band);

// Sum of power * resolution over bins with low_hz <= f < high_hz. Used where
// adjacent bands must partition the bins without sharing any.
double binned_power(const PsdEstimate& psd, double low_hz, double high_hz);

struct SpectrogramFrame {
  double t_start_seconds = 0.0;
  PsdEstimate psd;
};

// One single-window periodogram per hop;
// frames = floor((len - window) / hop) + 1.
std::vector<SpectrogramFrame> spectrogram(std::span<const double> signal,
                                          double sample_rate_hz,
                                          double window_seconds,
                                          double hop_seconds);

// Frequencies of the `count` strongest local maxima, strongest first.
std::vector<double> spectral_peaks(const PsdEstimate& psd, std::size_t count);

}  // namespace npds::dsp

#endif  // NPDS_DSP_SPECTRAL_HPP_
