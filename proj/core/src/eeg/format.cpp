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

#include "npds/eeg/format.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>

#include "npds/error.hpp"

namespace npds::eeg {
namespace {

constexpr std::array<std::string_view, 6> kReservedKeys = {
    "id", "user", "description", "battery", "lat", "lon"};

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  template <typename T>
  void put_le(T value) {
    using U = std::make_unsigned_t<T>;
    auto bits = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(bits & 0xFF));
      bits = static_cast<U>(bits >> 8);
    }
  }
  void put_f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
  void put_bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(Errc::kTruncatedFile,
                  std::string("file truncated while reading ") + what);
    }
  }

  template <typename T>
  T get_le(const char* what) {
    using U = std::make_unsigned_t<T>;
    require(sizeof(T), what);
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return static_cast<T>(bits);
  }
  float get_f32(const char* what) {
    return std::bit_cast<float>(get_le<std::uint32_t>(what));
  }
  double get_f64(const char* what) {
    return std::bit_cast<double>(get_le<std::uint64_t>(what));
  }
  std::string_view get_bytes(std::size_t n, const char* what) {
    require(n, what);
    std::string_view s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

[[noreturn]] void metadata_error(const std::string& what) {
  throw Error(Errc::kMetadataDecodeError, what);
}

double parse_double_field(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    metadata_error("metadata key '" + std::string(key) +
                   "' is not a number: '" + std::string(text) + "'");
  }
  return v;
}

KeyValueLines metadata_lines(const EegRecording& rec) {
  const auto& md = rec.metadata();
  KeyValueLines lines;
  lines.emplace_back("id", rec.recording_id());
  if (!md.user_id.empty()) lines.emplace_back("user", md.user_id);
  if (!md.description.empty()) lines.emplace_back("description", md.description);
  if (md.battery_level_percent) {
    lines.emplace_back("battery", std::to_string(*md.battery_level_percent));
  }
  if (md.location) {
    lines.emplace_back("lat", format_double(md.location->latitude_deg));
    lines.emplace_back("lon", format_double(md.location->longitude_deg));
  }
  for (const auto& [k, v] : md.extra) lines.emplace_back(k, v);
  return lines;
}

struct DecodedMetadata {
  std::optional<std::string> id;
  RecordingMetadata metadata;
};

DecodedMetadata decode_metadata(std::string_view block) {
  DecodedMetadata out;
  std::optional<double> lat;
  std::optional<double> lon;
  for (auto& [key, value] : parse_key_value_block(block)) {
    if (key == "id") {
      if (value.empty()) metadata_error("empty recording id");
      out.id = value;
    } else if (key == "user") {
      out.metadata.user_id = value;
    } else if (key == "description") {
      out.metadata.description = value;
    } else if (key == "battery") {
      int pct = 0;
      auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), pct);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        metadata_error("battery is not an integer: '" + value + "'");
      }
      out.metadata.battery_level_percent = pct;
    } else if (key == "lat") {
      lat = parse_double_field(key, value);
    } else if (key == "lon") {
      lon = parse_double_field(key, value);
    } else {
      out.metadata.extra.emplace(std::move(key), std::move(value));
    }
  }
  if (lat.has_value() != lon.has_value()) {
    metadata_error("lat and lon must be given together");
  }
  if (lat) out.metadata.location = GeoLocation{*lat, *lon};
  validate_metadata(out.metadata);
  return out;
}

}  // namespace

bool is_reserved_metadata_key(std::string_view key) {
  for (auto k : kReservedKeys) {
    if (k == key) return true;
  }
  return false;
}

KeyValueLines parse_key_value_block(std::string_view text) {
  if (!valid_utf8(text)) metadata_error("metadata block is not valid UTF-8");
  KeyValueLines lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      metadata_error("metadata line without key<TAB>value: '" +
                     std::string(line) + "'");
    }
    std::string key(line.substr(0, tab));
    std::string value(line.substr(tab + 1));
    if (value.find('\t') != std::string::npos) {
      metadata_error("metadata value for '" + key + "' contains a TAB");
    }
    for (const auto& existing : lines) {
      if (existing.first == key) metadata_error("duplicate metadata key '" + key + "'");
    }
    lines.emplace_back(std::move(key), std::move(value));
  }
  return lines;
}

std::string format_key_value_block(const KeyValueLines& lines) {
  std::string out;
  for (const auto& [k, v] : lines) {
    out += k;
    out += '\t';
    out += v;
    out += '\n';
  }
  return out;
}

std::size_t serialized_size(const EegRecording& rec) {
  std::size_t size = kFixedHeaderBytes +
                     format_key_value_block(metadata_lines(rec)).size() + 8;
  for (const auto& label : rec.channels()) size += 2 + label.size();
  return size + 4 * rec.channel_count() * rec.sample_count();
}

std::vector<std::uint8_t> serialize_recording(const EegRecording& rec) {
  const std::string metadata = format_key_value_block(metadata_lines(rec));
  ByteWriter w(serialized_size(rec));
  w.put_bytes(kRecordingMagic);
  w.put_le<std::uint16_t>(kFormatVersion);
  w.put_le<std::uint16_t>(static_cast<std::uint16_t>(rec.channel_count()));
  w.put_f64(rec.sample_rate_hz());
  w.put_le<std::int64_t>(rec.start_time_micros());
  w.put_le<std::uint32_t>(static_cast<std::uint32_t>(metadata.size()));
  w.put_bytes(metadata);
  w.put_le<std::uint64_t>(rec.sample_count());
  for (std::size_t c = 0; c < rec.channel_count(); ++c) {
    const auto& label = rec.channels()[c];
    w.put_le<std::uint16_t>(static_cast<std::uint16_t>(label.size()));
    w.put_bytes(label);
    for (float s : rec.channel(c)) w.put_f32(s);
  }
  return w.take();
}

std::pair<EegRecording, std::size_t> parse_recording_prefix(
    std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kRecordingMagic.size() ||
      std::memcmp(bytes.data(), kRecordingMagic.data(),
                  kRecordingMagic.size()) != 0) {
    throw Error(Errc::kBadMagic, "input does not start with NPDSEEG1");
  }
  ByteReader r(bytes);
  r.get_bytes(kRecordingMagic.size(), "magic");
  const auto version = r.get_le<std::uint16_t>("format version");
  if (version != kFormatVersion) {
    throw Error(Errc::kInvalidHeader,
                "unsupported format version " + std::to_string(version));
  }
  const auto channel_count = r.get_le<std::uint16_t>("channel count");
  const double sample_rate = r.get_f64("sample rate");
  const auto start_micros = r.get_le<std::int64_t>("start time");
  const auto metadata_len = r.get_le<std::uint32_t>("metadata length");
  if (channel_count == 0) throw Error(Errc::kInvalidHeader, "zero channels");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(Errc::kInvalidHeader, "non-positive sample rate");
  }
  const std::string_view metadata_block = r.get_bytes(metadata_len, "metadata");
  const auto samples_per_channel = r.get_le<std::uint64_t>("sample count");
  if (samples_per_channel == 0) {
    throw Error(Errc::kInvalidHeader, "zero samples per channel");
  }
  // Reject impossible declarations before allocating.
  if (samples_per_channel > r.remaining() / 4) {
    throw Error(Errc::kTruncatedFile,
                "declared sample count exceeds remaining input");
  }

  std::vector<ChannelLabel> labels;
  std::vector<std::vector<float>> samples;
  labels.reserve(channel_count);
  samples.reserve(channel_count);
  for (std::uint16_t c = 0; c < channel_count; ++c) {
    const auto label_len = r.get_le<std::uint16_t>("channel label length");
    labels.emplace_back(r.get_bytes(label_len, "channel label"));
    r.require(4 * samples_per_channel, "channel samples");
    std::vector<float> row(samples_per_channel);
    for (auto& s : row) s = r.get_f32("sample");
    samples.push_back(std::move(row));
  }
  for (const auto& label : labels) {
    if (!valid_utf8(label)) {
      throw Error(Errc::kInvalidHeader, "channel label is not valid UTF-8");
    }
  }

  const std::size_t consumed = r.position();
  DecodedMetadata decoded = decode_metadata(metadata_block);
  std::string id = decoded.id ? *decoded.id : content_id(bytes.first(consumed));
  return {EegRecording(std::move(id), std::move(labels), sample_rate,
                       start_micros, std::move(samples),
                       std::move(decoded.metadata)),
          consumed};
}

EegRecording parse_recording(std::span<const std::uint8_t> bytes) {
  auto [rec, consumed] = parse_recording_prefix(bytes);
  if (consumed != bytes.size()) {
    throw Error(Errc::kInvalidHeader,
                std::to_string(bytes.size() - consumed) +
                    " trailing bytes after recording payload");
  }
  return std::move(rec);
}

std::vector<std::span<const std::uint8_t>> split_recordings(
    std::span<const std::uint8_t> bytes) {
  std::vector<std::span<const std::uint8_t>> out;
  while (!bytes.empty()) {
    auto consumed = parse_recording_prefix(bytes).second;
    out.push_back(bytes.first(consumed));
    bytes = bytes.subspan(consumed);
  }
  return out;
}

std::string content_id(std::span<const std::uint8_t> bytes) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> hex{};
  std::snprintf(hex.data(), hex.size(), "%016llx",
                static_cast<unsigned long long>(h));
  return "file-" + std::string(hex.data(), 16);
}

}  // namespace npds::eeg
