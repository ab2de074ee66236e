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

#include "npds/eeg/recording.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "npds/eeg/format.hpp"
#include "npds/error.hpp"

namespace npds::eeg {
namespace {

bool has_control_separator(std::string_view s) {
  return s.find('\t') != std::string_view::npos ||
         s.find('\n') != std::string_view::npos;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(Errc::kInvalidHeader, what);
}

}  // namespace

void validate_metadata(const RecordingMetadata& metadata) {
  auto fail = [](const std::string& what) {
    throw Error(Errc::kMetadataDecodeError, what);
  };
  if (has_control_separator(metadata.user_id) ||
      has_control_separator(metadata.description)) {
    fail("metadata values may not contain TAB or LF");
  }
  if (metadata.battery_level_percent &&
      (*metadata.battery_level_percent < 0 ||
       *metadata.battery_level_percent > 100)) {
    fail("battery level outside 0..100");
  }
  if (metadata.location) {
    const auto& loc = *metadata.location;
    if (!(loc.latitude_deg >= -90.0 && loc.latitude_deg <= 90.0)) {
      fail("latitude outside [-90, 90]");
    }
    if (!(loc.longitude_deg >= -180.0 && loc.longitude_deg <= 180.0)) {
      fail("longitude outside [-180, 180]");
    }
  }
  for (const auto& [key, value] : metadata.extra) {
    if (key.empty() || has_control_separator(key) ||
        has_control_separator(value)) {
      fail("malformed extra metadata entry '" + key + "'");
    }
    if (is_reserved_metadata_key(key)) {
      fail("extra metadata uses reserved key '" + key + "'");
    }
  }
}

EegRecording::EegRecording(std::string recording_id,
                           std::vector<ChannelLabel> channels,
                           double sample_rate_hz,
                           std::int64_t start_time_micros,
                           std::vector<std::vector<float>> samples,
                           RecordingMetadata metadata)
    : recording_id_(std::move(recording_id)),
      channels_(std::move(channels)),
      sample_rate_hz_(sample_rate_hz),
      start_time_micros_(start_time_micros),
      samples_(std::move(samples)),
      metadata_(std::move(metadata)) {
  if (recording_id_.empty() || has_control_separator(recording_id_)) {
    invalid("recording id must be non-empty and free of TAB/LF");
  }
  if (channels_.empty()) invalid("recording has no channels");
  if (channels_.size() > 0xFFFF) invalid("too many channels");
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    invalid("sample rate must be positive and finite");
  }
  if (samples_.size() != channels_.size()) {
    invalid("sample matrix row count differs from channel count");
  }
  std::set<std::string_view> seen;
  for (const auto& label : channels_) {
    if (label.empty() || label.size() > 0xFFFF) invalid("bad channel label");
    if (!seen.insert(label).second) {
      invalid("duplicate channel label '" + label + "'");
    }
  }
  const std::size_t n = samples_.front().size();
  if (n == 0) invalid("recording has no samples");
  for (const auto& row : samples_) {
    if (row.size() != n) invalid("channels have differing sample counts");
  }
  validate_metadata(metadata_);
}

std::int64_t EegRecording::end_time_micros() const {
  return start_time_micros_ +
         static_cast<std::int64_t>(std::llround(duration_seconds() * 1e6));
}

std::optional<std::size_t> EegRecording::channel_index(
    std::string_view label) const {
  auto it = std::find(channels_.begin(), channels_.end(), label);
  if (it == channels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - channels_.begin());
}

std::vector<double> EegRecording::channel_as_double(
    std::string_view label) const {
  auto index = channel_index(label);
  if (!index) {
    throw Error(Errc::kMissingChannel,
                "channel '" + std::string(label) + "' not in recording " +
                    recording_id_);
  }
  return channel_as_double(*index);
}

std::vector<double> EegRecording::channel_as_double(std::size_t index) const {
  const auto& row = samples_.at(index);
  return {row.begin(), row.end()};
}

EegRecording EegRecording::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > sample_count()) {
    throw Error(Errc::kInvalidArgument, "slice outside recording");
  }
  std::vector<std::vector<float>> rows;
  rows.reserve(samples_.size());
  for (const auto& row : samples_) {
    rows.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(first),
                      row.begin() + static_cast<std::ptrdiff_t>(first + count));
  }
  const auto offset = static_cast<std::int64_t>(
      std::llround(static_cast<double>(first) / sample_rate_hz_ * 1e6));
  return EegRecording(recording_id_ + "#" + std::to_string(first), channels_,
                      sample_rate_hz_, start_time_micros_ + offset,
                      std::move(rows), metadata_);
}

EegRecording EegRecording::with_id(std::string recording_id) const {
  return EegRecording(std::move(recording_id), channels_, sample_rate_hz_,
                      start_time_micros_, samples_, metadata_);
}

EegRecording EegRecording::with_metadata(RecordingMetadata metadata) const {
  return EegRecording(recording_id_, channels_, sample_rate_hz_,
                      start_time_micros_, samples_, std::move(metadata));
}

}  // namespace npds::eeg
