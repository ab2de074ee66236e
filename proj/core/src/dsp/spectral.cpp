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

#include "npds/dsp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include "npds/error.hpp"

namespace npds::dsp {
namespace {

// fftw planner calls are not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Real-to-complex transform of a fixed size with owned buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::span<double> input() { return {in_, n_}; }

  // |X_k|^2 for k = 0 .. n/2.
  void power(std::span<double> out) {
    fftw_execute(plan_);
    for (std::size_t k = 0; k < n_ / 2 + 1; ++k) {
      out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_ = nullptr;
};

std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::size_t window_samples(double window_seconds, double fs) {
  if (!(fs > 0.0) || !(window_seconds > 0.0)) {
    throw Error(Errc::kInvalidArgument,
                "sample rate and window length must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(window_seconds * fs));
  if (n < 2) throw Error(Errc::kInvalidArgument, "window shorter than 2 samples");
  return n;
}

// Linear interpolation of the PSD at frequency f (within range).
double power_at(const PsdEstimate& psd, double f) {
  const double pos = f / psd.resolution_hz;
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= psd.power.size()) return psd.power.back();
  const double frac = pos - static_cast<double>(i);
  return psd.power[i] + frac * (psd.power[i + 1] - psd.power[i]);
}

}  // namespace

double PsdEstimate::total_power() const {
  return std::accumulate(power.begin(), power.end(), 0.0) * resolution_hz;
}

double PsdEstimate::peak_frequency() const {
  auto it = std::max_element(power.begin(), power.end());
  return frequencies_hz[static_cast<std::size_t>(it - power.begin())];
}

FrequencyBand standard_band(const std::string& name) {
  for (const auto* b : {&bands::kDelta, &bands::kTheta, &bands::kAlpha,
                        &bands::kBeta, &bands::kGamma}) {
    if (b->name == name) return *b;
  }
  throw Error(Errc::kBandOutOfRange, "unknown band '" + name + "'");
}

PsdEstimate psd_welch(std::span<const double> signal, double sample_rate_hz,
                      double window_seconds, double overlap_fraction) {
  const std::size_t nperseg = window_samples(window_seconds, sample_rate_hz);
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw Error(Errc::kInvalidArgument, "overlap fraction must be in [0, 1)");
  }
  if (signal.size() < nperseg) {
    throw Error(Errc::kSignalTooShort,
                "signal of " + std::to_string(signal.size()) +
                    " samples is shorter than the " + std::to_string(nperseg) +
                    "-sample window");
  }
  const auto overlap = static_cast<std::size_t>(
      std::llround(overlap_fraction * static_cast<double>(nperseg)));
  const std::size_t step = std::max<std::size_t>(1, nperseg - overlap);
  const std::size_t segments = (signal.size() - nperseg) / step + 1;
  const std::size_t bins = nperseg / 2 + 1;

  const auto window = hann_periodic(nperseg);
  const double window_energy =
      std::inner_product(window.begin(), window.end(), window.begin(), 0.0);

  RealFft fft(nperseg);
  std::vector<double> accum(bins, 0.0);
  std::vector<double> seg_power(bins);
  for (std::size_t s = 0; s < segments; ++s) {
    const auto segment = signal.subspan(s * step, nperseg);
    const double mean =
        std::accumulate(segment.begin(), segment.end(), 0.0) /
        static_cast<double>(nperseg);
    auto in = fft.input();
    for (std::size_t i = 0; i < nperseg; ++i) {
      in[i] = (segment[i] - mean) * window[i];
    }
    fft.power(seg_power);
    for (std::size_t k = 0; k < bins; ++k) accum[k] += seg_power[k];
  }

  PsdEstimate psd;
  psd.resolution_hz = sample_rate_hz / static_cast<double>(nperseg);
  psd.window_seconds = static_cast<double>(nperseg) / sample_rate_hz;
  psd.overlap_fraction = overlap_fraction;
  psd.segments = segments;
  psd.frequencies_hz.resize(bins);
  psd.power.resize(bins);
  const double scale =
      1.0 / (sample_rate_hz * window_energy * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    psd.frequencies_hz[k] = static_cast<double>(k) * psd.resolution_hz;
    const bool unpaired = k == 0 || (nperseg % 2 == 0 && k == bins - 1);
    psd.power[k] = accum[k] * scale * (unpaired ? 1.0 : 2.0);
  }
  return psd;
}

double band_power(const PsdEstimate& psd, const FrequencyBand& band) {
  const double nyquist = psd.frequencies_hz.back();
  if (!(band.low_hz >= 0.0) || !(band.low_hz < band.high_hz) ||
      band.high_hz > nyquist * (1.0 + 1e-12)) {
    throw Error(Errc::kBandOutOfRange,
                "band '" + band.name + "' [" + std::to_string(band.low_hz) +
                    ", " + std::to_string(band.high_hz) +
                    "] Hz outside [0, " + std::to_string(nyquist) + "] Hz");
  }
  const double lo = band.low_hz;
  const double hi = std::min(band.high_hz, nyquist);
  double total = 0.0;
  double prev_f = lo;
  double prev_p = power_at(psd, lo);
  for (std::size_t k = 0; k < psd.frequencies_hz.size(); ++k) {
    const double f = psd.frequencies_hz[k];
    if (f <= lo) continue;
    if (f >= hi) break;
    total += 0.5 * (prev_p + psd.power[k]) * (f - prev_f);
    prev_f = f;
    prev_p = psd.power[k];
  }
  total += 0.5 * (prev_p + power_at(psd, hi)) * (hi - prev_f);
  return std::max(total, 0.0);
}

double binned_power(const PsdEstimate& psd, double low_hz, double high_hz) {
  // Bins sitting exactly on an edge belong to the upper band regardless of
  // rounding in the edge arithmetic.
  const double eps = 1e-9 * psd.resolution_hz;
  double total = 0.0;
  for (std::size_t k = 0; k < psd.frequencies_hz.size(); ++k) {
    const double f = psd.frequencies_hz[k];
    if (f >= low_hz - eps && f < high_hz - eps) total += psd.power[k];
  }
  return total * psd.resolution_hz;
}

std::vector<SpectrogramFrame> spectrogram(std::span<const double> signal,
                                          double sample_rate_hz,
                                          double window_seconds,
                                          double hop_seconds) {
  const std::size_t win = window_samples(window_seconds, sample_rate_hz);
  const auto hop = static_cast<std::size_t>(std::llround(hop_seconds * sample_rate_hz));
  if (hop == 0) throw Error(Errc::kInvalidArgument, "hop shorter than one sample");
  if (signal.size() < win) {
    throw Error(Errc::kSignalTooShort, "signal shorter than one spectrogram window");
  }
  const std::size_t frames = (signal.size() - win) / hop + 1;
  std::vector<SpectrogramFrame> out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    out.push_back(SpectrogramFrame{
        static_cast<double>(f * hop) / sample_rate_hz,
        psd_welch(signal.subspan(f * hop, win), sample_rate_hz, window_seconds, 0.0)});
  }
  return out;
}

std::vector<double> spectral_peaks(const PsdEstimate& psd, std::size_t count) {
  std::vector<std::size_t> maxima;
  const auto& p = psd.power;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    if (p[k] > p[k - 1] && p[k] >= p[k + 1] && p[k] > 0.0) maxima.push_back(k);
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  if (maxima.size() > count) maxima.resize(count);
  std::vector<double> out;
  out.reserve(maxima.size());
  for (auto k : maxima) out.push_back(psd.frequencies_hz[k]);
  return out;
}

}  // namespace npds::dsp
