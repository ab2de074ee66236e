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

#ifndef NPDS_EEG_RECORDING_HPP_
#define NPDS_EEG_RECORDING_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace npds::eeg {

// Electrode name from the 10-20 nomenclature ("F3", "O2", "CZ") or "CH<n>".
using ChannelLabel = std::string;

struct GeoLocation {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;

  bool operator==(const GeoLocation&) const = default;
};

struct RecordingMetadata {
  std::string user_id;
  std::string description;
  std::optional<int> battery_level_percent;
  std::optional<GeoLocation> location;
  // Free-form entries. Keys must not collide with the reserved metadata keys.
  std::map<std::string, std::string> extra;

  bool operator==(const RecordingMetadata&) const = default;
};

// Multi-channel raw EEG. Samples are microvolts stored as 32-bit floats,
// channel-major. Immutable once constructed; the constructor enforces every
// structural invariant and throws npds::Error otherwise.
class EegRecording {
 public:
  EegRecording(std::string recording_id, std::vector<ChannelLabel> channels,
               double sample_rate_hz, std::int64_t start_time_micros,
               std::vector<std::vector<float>> samples,
               RecordingMetadata metadata = {});

  const std::string& recording_id() const { return recording_id_; }
  const std::vector<ChannelLabel>& channels() const { return channels_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  std::int64_t start_time_micros() const { return start_time_micros_; }
  std::int64_t end_time_micros() const;
  const RecordingMetadata& metadata() const { return metadata_; }

  std::size_t channel_count() const { return channels_.size(); }
  std::size_t sample_count() const { return samples_.front().size(); }
  double duration_seconds() const {
    return static_cast<double>(sample_count()) / sample_rate_hz_;
  }

  std::span<const float> channel(std::size_t index) const {
    return samples_.at(index);
  }
  std::optional<std::size_t> channel_index(std::string_view label) const;
  // Throws Errc::kMissingChannel.
  std::vector<double> channel_as_double(std::string_view label) const;
  std::vector<double> channel_as_double(std::size_t index) const;

  // Samples [first, first + count) of every channel. start_time advances
  // accordingly and the id gets a "#<first>" suffix.
  EegRecording slice(std::size_t first, std::size_t count) const;

  EegRecording with_id(std::string recording_id) const;
  EegRecording with_metadata(RecordingMetadata metadata) const;

  bool operator==(const EegRecording&) const = default;

 private:
  std::string recording_id_;
  std::vector<ChannelLabel> channels_;
  double sample_rate_hz_;
  std::int64_t start_time_micros_;
  std::vector<std::vector<float>> samples_;
  RecordingMetadata metadata_;
};

// Throws Errc::kMetadataDecodeError when the metadata violates its invariants
// (coordinate ranges, battery range, TAB/LF inside values, reserved keys in
// `extra`).
void validate_metadata(const RecordingMetadata& metadata);

}  // namespace npds::eeg

#endif  // NPDS_EEG_RECORDING_HPP_
