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

#include "npds/agg/fixed_point.hpp"

#include <cmath>
#include <string>

#include "npds/error.hpp"

namespace npds::agg {

std::uint64_t encode_fixed(double x) {
  if (!std::isfinite(x) || std::abs(x) > kMaxEncodableMagnitude) {
    throw Error(Errc::kRangeExceeded,
                "value " + std::to_string(x) + " outside the encodable range +/-2^40");
  }
  const auto scaled = static_cast<std::int64_t>(
      std::llround(x * static_cast<double>(kFixedPointScale)));
  return static_cast<std::uint64_t>(scaled);
}

double decode_fixed(std::uint64_t value, std::size_t n_participants) {
  if (n_participants == 0) {
    throw Error(Errc::kInvalidArgument, "decode needs at least one participant");
  }
  return static_cast<double>(static_cast<std::int64_t>(value)) /
         static_cast<double>(kFixedPointScale);
}

}  // namespace npds::agg
