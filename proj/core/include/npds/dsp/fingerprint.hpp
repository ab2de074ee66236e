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

#ifndef NPDS_DSP_FINGERPRINT_HPP_
#define NPDS_DSP_FINGERPRINT_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npds/eeg/recording.hpp"

namespace npds::dsp {

enum class FingerprintKind { kArCoeffs, kAlphaSubbands };

std::string_view fingerprint_kind_name(FingerprintKind kind);

struct Fingerprint {
  std::string subject_id;
  FingerprintKind kind = FingerprintKind::kArCoeffs;
  // Channel-major: channel 0's features first.
  std::vector<double> vector;
  std::vector<eeg::ChannelLabel> channel_set;
};

inline constexpr std::size_t kDefaultArOrder = 6;

// Yule-Walker AR(p) coefficients of a single series (biased autocovariance of
// the mean-removed signal, Levinson-Durbin recursion). Coefficients follow
// x[t] = sum a_i x[t-i] + e[t]. Throws Errc::kSingularAutocovariance,
// Errc::kSignalTooShort.
std::vector<double> yule_walker(std::span<const double> x, std::size_t order);

Fingerprint ar_fingerprint(const eeg::EegRecording& rec,
                           std::size_t order = kDefaultArOrder);

// The 8-13 Hz range split into `subbands` equal-width half-open intervals;
// per-channel powers normalized to sum to one. Throws Errc::kDegeneratePower,
// Errc::kInvalidArgument.
Fingerprint alpha_subband_fingerprint(const eeg::EegRecording& rec,
                                      std::size_t subbands);

struct Identification {
  std::string subject_id;
  double distance = 0.0;
};

// Nearest-neighbour identification on per-dimension standardized vectors.
// A subject may be enrolled with several templates.
class IdentityModel {
 public:
  // Throws Errc::kEmptyModel (fewer than two distinct subjects) and
  // Errc::kKindMismatch (mixed kinds or lengths).
  static IdentityModel enroll(std::vector<Fingerprint> templates);

  // Ties resolve to the lexicographically smallest subject id.
  Identification identify(const Fingerprint& probe) const;

  FingerprintKind kind() const { return kind_; }
  std::size_t dimension() const { return mean_.size(); }
  std::size_t template_count() const { return templates_.size(); }

 private:
  IdentityModel() = default;
  std::vector<double> standardize(std::span<const double> v) const;

  FingerprintKind kind_ = FingerprintKind::kArCoeffs;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<std::pair<std::string, std::vector<double>>> templates_;
};

}  // namespace npds::dsp

#endif  // NPDS_DSP_FINGERPRINT_HPP_
