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

#include "npds/dsp/fingerprint.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "npds/dsp/features.hpp"
#include "npds/dsp/spectral.hpp"
#include "npds/error.hpp"

namespace npds::dsp {

std::string_view fingerprint_kind_name(FingerprintKind kind) {
  return kind == FingerprintKind::kArCoeffs ? "AR_COEFFS" : "ALPHA_SUBBANDS";
}

std::vector<double> yule_walker(std::span<const double> x, std::size_t order) {
  if (order == 0) throw Error(Errc::kInvalidArgument, "AR order must be >= 1");
  if (x.size() < 10 * order) {
    throw Error(Errc::kSignalTooShort,
                "AR(" + std::to_string(order) + ") needs at least " +
                    std::to_string(10 * order) + " samples");
  }
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> r(order + 1, 0.0);
  for (std::size_t lag = 0; lag <= order; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < x.size(); ++t) {
      acc += (x[t] - mean) * (x[t + lag] - mean);
    }
    r[lag] = acc / n;
  }
  // A zero-variance series leaves only rounding residue in r[0].
  if (!(r[0] > 1e-18 * mean * mean) || r[0] <= 0.0) {
    throw Error(Errc::kSingularAutocovariance, "series has zero variance");
  }

  std::vector<double> a(order, 0.0);
  std::vector<double> prev(order, 0.0);
  double err = r[0];
  for (std::size_t m = 1; m <= order; ++m) {
    double acc = r[m];
    for (std::size_t i = 1; i < m; ++i) acc -= a[i - 1] * r[m - i];
    const double k = acc / err;
    prev = a;
    for (std::size_t i = 1; i < m; ++i) a[i - 1] = prev[i - 1] - k * prev[m - i - 1];
    a[m - 1] = k;
    err *= 1.0 - k * k;
    if (!(err > 1e-12 * r[0])) {
      throw Error(Errc::kSingularAutocovariance,
                  "autocovariance matrix not positive definite at order " +
                      std::to_string(m));
    }
  }
  return a;
}

Fingerprint ar_fingerprint(const eeg::EegRecording& rec, std::size_t order) {
  Fingerprint fp;
  fp.subject_id = rec.metadata().user_id;
  fp.kind = FingerprintKind::kArCoeffs;
  fp.channel_set = rec.channels();
  fp.vector.reserve(rec.channel_count() * order);
  for (std::size_t c = 0; c < rec.channel_count(); ++c) {
    const auto coeffs = yule_walker(rec.channel_as_double(c), order);
    fp.vector.insert(fp.vector.end(), coeffs.begin(), coeffs.end());
  }
  return fp;
}

Fingerprint alpha_subband_fingerprint(const eeg::EegRecording& rec,
                                      std::size_t subbands) {
  if (subbands < 2) throw Error(Errc::kInvalidArgument, "need at least 2 subbands");
  const double lo = bands::kAlpha.low_hz;
  const double width = (bands::kAlpha.high_hz - lo) / static_cast<double>(subbands);
  Fingerprint fp;
  fp.subject_id = rec.metadata().user_id;
  fp.kind = FingerprintKind::kAlphaSubbands;
  fp.channel_set = rec.channels();
  for (std::size_t c = 0; c < rec.channel_count(); ++c) {
    const auto psd = psd_welch(rec.channel_as_double(c), rec.sample_rate_hz());
    if (psd.frequencies_hz.back() < bands::kAlpha.high_hz) {
      throw Error(Errc::kBandOutOfRange, "sample rate too low for the alpha band");
    }
    std::vector<double> powers(subbands);
    for (std::size_t b = 0; b < subbands; ++b) {
      const double b_lo = lo + width * static_cast<double>(b);
      const double b_hi = b + 1 == subbands ? bands::kAlpha.high_hz : b_lo + width;
      powers[b] = binned_power(psd, b_lo, b_hi);
    }
    const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
    if (total < kPowerFloorUv2) {
      throw Error(Errc::kDegeneratePower,
                  "alpha power below floor on " + rec.channels()[c]);
    }
    for (double p : powers) fp.vector.push_back(p / total);
  }
  return fp;
}

IdentityModel IdentityModel::enroll(std::vector<Fingerprint> templates) {
  std::set<std::string> subjects;
  for (const auto& t : templates) subjects.insert(t.subject_id);
  if (subjects.size() < 2) {
    throw Error(Errc::kEmptyModel, "enrollment needs at least two subjects");
  }
  IdentityModel model;
  model.kind_ = templates.front().kind;
  const std::size_t dim = templates.front().vector.size();
  if (dim == 0) throw Error(Errc::kKindMismatch, "empty fingerprint vector");
  for (const auto& t : templates) {
    if (t.kind != model.kind_ || t.vector.size() != dim) {
      throw Error(Errc::kKindMismatch, "enrollment fingerprints differ in kind or length");
    }
    for (double v : t.vector) {
      if (!std::isfinite(v)) throw Error(Errc::kInvalidArgument, "non-finite fingerprint entry");
    }
  }

  const double n = static_cast<double>(templates.size());
  model.mean_.assign(dim, 0.0);
  model.scale_.assign(dim, 0.0);
  for (const auto& t : templates) {
    for (std::size_t d = 0; d < dim; ++d) model.mean_[d] += t.vector[d] / n;
  }
  for (const auto& t : templates) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double dev = t.vector[d] - model.mean_[d];
      model.scale_[d] += dev * dev / n;
    }
  }
  for (auto& s : model.scale_) {
    s = std::sqrt(s);
    // Constant dimensions carry no information; leave them unscaled.
    if (!(s > 0.0)) s = 1.0;
  }
  for (auto& t : templates) {
    model.templates_.emplace_back(std::move(t.subject_id), model.standardize(t.vector));
  }
  return model;
}

std::vector<double> IdentityModel::standardize(std::span<const double> v) const {
  std::vector<double> z(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) z[d] = (v[d] - mean_[d]) / scale_[d];
  return z;
}

Identification IdentityModel::identify(const Fingerprint& probe) const {
  if (probe.kind != kind_ || probe.vector.size() != mean_.size()) {
    throw Error(Errc::kKindMismatch, "probe does not match the enrolled fingerprint kind");
  }
  const auto z = standardize(probe.vector);
  Identification best{"", std::numeric_limits<double>::infinity()};
  for (const auto& [subject, tz] : templates_) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < z.size(); ++d) d2 += (z[d] - tz[d]) * (z[d] - tz[d]);
    const double dist = std::sqrt(d2);
    if (dist < best.distance || (dist == best.distance && subject < best.subject_id)) {
      best = {subject, dist};
    }
  }
  return best;
}

}  // namespace npds::dsp
