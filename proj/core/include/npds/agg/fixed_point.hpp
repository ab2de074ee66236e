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

#ifndef NPDS_AGG_FIXED_POINT_HPP_
#define NPDS_AGG_FIXED_POINT_HPP_

#include <cstddef>
#include <cstdint>

namespace npds::agg {

// Reals travel as round(x * 2^20) in Z/2^64 (two's-complement embedding).
inline constexpr int kFixedPointBits = 20;
inline constexpr std::uint64_t kFixedPointScale = std::uint64_t{1} << kFixedPointBits;
// Largest encodable magnitude, 2^40.
inline constexpr double kMaxEncodableMagnitude = 1099511627776.0;

// Throws Errc::kRangeExceeded for |x| > 2^40 or non-finite x.
std::uint64_t encode_fixed(double x);

// Inverse of encode_fixed applied to a modular sum of n encodings. Exact when
// sum |x_i| * 2^20 < 2^62. Throws Errc::kInvalidArgument for n == 0.
double decode_fixed(std::uint64_t value, std::size_t n_participants);

}  // namespace npds::agg

#endif  // NPDS_AGG_FIXED_POINT_HPP_
