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

#include "npds/qe/drowsy_places.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "npds/error.hpp"

namespace npds::qe {

std::vector<PlaceCluster> compute_drowsy_places(
    std::span<const DrowsinessObservation> observations, std::size_t k) {
  if (k == 0) throw Error(Errc::kInvalidArgument, "k must be at least 1");
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::pair<long long, long long>, Acc> cells;
  for (const auto& obs : observations) {
    if (!obs.location) continue;
    auto key = std::make_pair(std::llround(obs.location->latitude_deg * 1000.0),
                              std::llround(obs.location->longitude_deg * 1000.0));
    auto& acc = cells[key];
    acc.sum += obs.ratio;
    ++acc.n;
  }
  if (cells.empty()) {
    throw Error(Errc::kNoLocatedAnswers, "no drowsiness answer carries a location");
  }
  std::vector<PlaceCluster> clusters;
  for (const auto& [key, acc] : cells) {
    clusters.push_back(PlaceCluster{static_cast<double>(key.first) / 1000.0,
                                    static_cast<double>(key.second) / 1000.0,
                                    acc.sum / static_cast<double>(acc.n), acc.n});
  }
  // cells is ordered by (lat, lon), so a stable sort keeps that as tie-break.
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const PlaceCluster& a, const PlaceCluster& b) {
                     return a.mean_ratio > b.mean_ratio;
                   });
  if (clusters.size() > k) clusters.resize(k);
  return clusters;
}

Json drowsy_places_payload(const std::vector<PlaceCluster>& clusters) {
  Json list = Json::array();
  for (const auto& c : clusters) {
    list.push_back(Json{{"lat", c.lat}, {"lon", c.lon}, {"mean_ratio", c.mean_ratio}, {"n", c.n}});
  }
  return Json{{"clusters", std::move(list)}};
}

}  // namespace npds::qe
