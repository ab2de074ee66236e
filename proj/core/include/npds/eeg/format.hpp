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

#ifndef NPDS_EEG_FORMAT_HPP_
#define NPDS_EEG_FORMAT_HPP_

// Binary recording interchange format, version 1. All integers little-endian.
//
//   offset  size  field
//   0       8     magic "NPDSEEG1"
//   8       2     u16 format_version (= 1)
//   10      2     u16 channel_count
//   12      8     f64 sample_rate_hz
//   20      8     i64 start_time_micros (UTC epoch)
//   28      4     u32 metadata_byte_length
//   32      m     metadata block, UTF-8 "key\tvalue\n" lines
//   32+m    8     u64 samples_per_channel
//   then channel_count blocks of
//           2     u16 label_length
//           l     UTF-8 label
//           4n    f32 samples (microvolts)
//
// Reserved metadata keys: id, user, description, battery, lat, lon. They are
// written in that order, followed by the extra keys in lexicographic order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npds/eeg/recording.hpp"

namespace npds::eeg {

inline constexpr std::string_view kRecordingMagic = "NPDSEEG1";
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 32;

using KeyValueLines = std::vector<std::pair<std::string, std::string>>;

bool is_reserved_metadata_key(std::string_view key);

// Parses "key\tvalue\n" lines. Rejects invalid UTF-8, lines without a TAB,
// empty keys and duplicate keys (Errc::kMetadataDecodeError). A missing final
// LF is tolerated.
KeyValueLines parse_key_value_block(std::string_view text);
std::string format_key_value_block(const KeyValueLines& lines);

std::vector<std::uint8_t> serialize_recording(const EegRecording& recording);

// Exact size serialize_recording() will produce.
std::size_t serialized_size(const EegRecording& recording);

// Parses exactly one recording occupying the whole input; trailing bytes are
// an InvalidHeader error.
EegRecording parse_recording(std::span<const std::uint8_t> bytes);

// Parses one recording from the front of `bytes` and returns it with the
// number of bytes consumed. Used to walk concatenated exports.
std::pair<EegRecording, std::size_t> parse_recording_prefix(
    std::span<const std::uint8_t> bytes);

// Splits a concatenation of serialized recordings into per-file byte ranges.
std::vector<std::span<const std::uint8_t>> split_recordings(
    std::span<const std::uint8_t> bytes);

// Stable identifier for files that carry no "id" metadata key.
std::string content_id(std::span<const std::uint8_t> bytes);

}  // namespace npds::eeg

#endif  // NPDS_EEG_FORMAT_HPP_
