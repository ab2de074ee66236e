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

#ifndef NPDS_QE_DROWSY_PLACES_HPP_
#define NPDS_QE_DROWSY_PLACES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "npds/eeg/recording.hpp"
#include "npds/qe/question.hpp"

namespace npds::qe {

struct DrowsinessObservation {
  std::optional<eeg::GeoLocation> location;
  double ratio = 0.0;
};

struct PlaceCluster {
  double lat = 0.0;
  double lon = 0.0;
  double mean_ratio = 0.0;
  std::size_t n = 0;
};

// Groups located observations by lat/lon rounded to 3 decimals (about 100 m)
// and returns up to k clusters, highest mean ratio first; equal means order
// by (lat, lon). Observations without a location are ignored.
// Throws Errc::kNoLocatedAnswers.
std::vector<PlaceCluster> compute_drowsy_places(
    std::span<const DrowsinessObservation> observations, std::size_t k);

// {"clusters": [{"lat", "lon", "mean_ratio", "n"}, ...]}
Json drowsy_places_payload(const std::vector<PlaceCluster>& clusters);

}  // namespace npds::qe

#endif  // NPDS_QE_DROWSY_PLACES_HPP_
