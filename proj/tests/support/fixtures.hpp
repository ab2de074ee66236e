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

#ifndef NPDS_TESTS_SUPPORT_FIXTURES_HPP_
#define NPDS_TESTS_SUPPORT_FIXTURES_HPP_

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <optional>
#include <string>
#include <vector>

#include "npds/eeg/recording.hpp"
#include "npds/error.hpp"
#include "npds/eeg/synthetic.hpp"

namespace npds::testing {

inline eeg::ChannelSpec channel(std::string label, std::vector<eeg::SignalComponent> parts) {
  return {std::move(label), std::move(parts)};
}

inline eeg::SyntheticSpec spec(double fs, double seconds, std::vector<eeg::ChannelSpec> channels,
                               std::string id = {}) {
  eeg::SyntheticSpec s;
  s.sample_rate_hz = fs;
  s.sample_count = static_cast<std::size_t>(fs * seconds);
  s.channels = std::move(channels);
  s.recording_id = std::move(id);
  s.metadata.user_id = "alice";
  return s;
}

inline eeg::SyntheticSpec with_location(eeg::SyntheticSpec s, double lat, double lon) {
  s.metadata.location = eeg::GeoLocation{lat, lon};
  return s;
}

inline eeg::SyntheticSpec starting_at(eeg::SyntheticSpec s, std::int64_t micros) {
  s.start_time_micros = micros;
  return s;
}

// Error code thrown by f, or kInternal when nothing was thrown.
template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kInternal;
}

// AR coefficients of a random stable model of even order, built from
// conjugate root pairs with moduli in [0.5, 0.92].
inline std::vector<double> random_stable_ar(std::uint64_t seed, std::size_t order) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.5, 0.92);
  std::uniform_real_distribution<double> angle(0.1, std::numbers::pi - 0.1);
  std::vector<std::complex<double>> poly{1.0};
  for (std::size_t k = 0; k < order / 2; ++k) {
    const auto root = std::polar(radius(rng), angle(rng));
    for (const auto r : {root, std::conj(root)}) {
      std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i];
        next[i + 1] -= r * poly[i];
      }
      poly = std::move(next);
    }
  }
  std::vector<double> a(order);
  for (std::size_t i = 0; i < order; ++i) a[i] = -poly[i + 1].real();
  return a;
}

// One-channel recording of a sum of sinusoids.
inline eeg::EegRecording tones(const std::string& id, std::vector<eeg::Sinusoid> parts,
                               double fs = 128.0, double seconds = 8.0,
                               const std::string& label = "O2") {
  std::vector<eeg::SignalComponent> comps(parts.begin(), parts.end());
  return eeg::generate_synthetic(spec(fs, seconds, {channel(label, comps)}, id), 1);
}

}  // namespace npds::testing

#endif  // NPDS_TESTS_SUPPORT_FIXTURES_HPP_
