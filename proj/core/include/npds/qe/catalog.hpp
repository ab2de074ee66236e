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

#ifndef NPDS_QE_CATALOG_HPP_
#define NPDS_QE_CATALOG_HPP_

// Built-in question catalog. The output schema id selects the extractor;
// params tune it. Only payloads matching one of these schemas are ever
// persisted.
//
//   schema           params (defaults)                              payload
//   band_power       band=alpha | low_hz+high_hz, channel, window_seconds=2,
//                    overlap=0.5                                    {band, power_uv2}
//   spectrogram      channel, window_seconds=2, hop_seconds=1, peaks=3
//                                                                   {frames: [{t_start, peaks}]}
//   alpha_asymmetry  left=F3, right=F4                              {left, right, asymmetry}
//   drowsiness       channel                                        {p4, p14, ratio}
//   fingerprint      kind=ar|alpha_subbands, order=6, subbands=5    {kind, vector}
//   ica              channels=<all>, max_iterations=500, tolerance=1e-5, seed=0
//                                                                   {n_components, converged, unmixing}
//   drowsy_places    k=5 (input: one drowsiness question)           {clusters: [{lat, lon, mean_ratio, n}]}
//
// `channel` defaults to the recording's first channel.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npds/eeg/recording.hpp"
#include "npds/qe/question.hpp"

namespace npds::qe {

inline constexpr std::size_t kMaxPayloadValues = 1024;

const std::vector<std::string>& known_schemas();
bool is_known_schema(std::string_view schema_id);
// Schemas computed per recording from raw samples.
bool is_raw_schema(std::string_view schema_id);

using QuestionLookup = std::function<std::optional<Question>(const std::string&)>;

// Checks inputs and params against the schema. Throws Errc::kUnknownSchema,
// Errc::kInvalidQuestion.
void validate_question_shape(const Question& q, const QuestionLookup& lookup);

// Number of numeric leaves in a JSON value.
std::size_t count_numeric_values(const Json& value);

// Throws Errc::kPayloadRejected when the payload does not match the schema
// field-for-field or exceeds kMaxPayloadValues numbers.
void validate_payload(std::string_view schema_id, const Json& payload);

// Runs the extractor of a raw-input question over one recording.
Json compute_raw_payload(const Question& q, const eeg::EegRecording& rec);

}  // namespace npds::qe

#endif  // NPDS_QE_CATALOG_HPP_
