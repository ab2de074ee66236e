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

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "npds/eeg/format.hpp"
#include "npds/eeg/recording.hpp"
#include "npds/error.hpp"

namespace npds::eeg {
namespace {

using Bytes = std::vector<std::uint8_t>;

EegRecording small_recording() {
  RecordingMetadata md;
  md.user_id = "alice";
  md.description = "resting, eyes closed";
  md.battery_level_percent = 87;
  md.location = GeoLocation{55.6761, 12.5683};
  md.extra = {{"device", "emotiv-epoc"}, {"session", "3"}};
  return EegRecording("rec-1", {"F3", "F4"}, 128.0, 1'700'000'000'000'000,
                      {{1.5f, -2.25f, 3.0f}, {0.0f, 10.0f, -0.125f}}, md);
}

EegRecording random_recording(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> channels(1, 4), samples(1, 300), coin(0, 1);
  std::uniform_real_distribution<float> value(-500.0f, 500.0f);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180), fs(1.0, 2048.0);
  const int c = channels(rng);
  const int n = samples(rng);
  std::vector<ChannelLabel> labels;
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < c; ++i) {
    labels.push_back("CH" + std::to_string(i + 1));
    std::vector<float> row(static_cast<std::size_t>(n));
    for (auto& v : row) v = value(rng);
    rows.push_back(std::move(row));
  }
  RecordingMetadata md;
  if (coin(rng)) md.user_id = "user" + std::to_string(rng() % 1000);
  if (coin(rng)) md.description = "desc ü " + std::to_string(rng() % 1000);
  if (coin(rng)) md.battery_level_percent = static_cast<int>(rng() % 101);
  if (coin(rng)) md.location = GeoLocation{lat(rng), lon(rng)};
  if (coin(rng)) md.extra["k" + std::to_string(rng() % 10)] = "v" + std::to_string(rng() % 10);
  return EegRecording("r" + std::to_string(rng()), labels, fs(rng),
                      static_cast<std::int64_t>(rng() >> 2), rows, md);
}

TEST(RecordingFormat, RoundTripsRandomRecordings) {
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 300; ++i) {
    const auto rec = random_recording(rng);
    const auto bytes = serialize_recording(rec);
    EXPECT_EQ(parse_recording(bytes), rec);
    EXPECT_EQ(serialize_recording(parse_recording(bytes)), bytes);
  }
}

TEST(RecordingFormat, SerializationIsDeterministic) {
  const auto rec = small_recording();
  EXPECT_EQ(serialize_recording(rec), serialize_recording(rec));
}

TEST(RecordingFormat, LengthMatchesLayout) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto rec = random_recording(rng);
    const auto bytes = serialize_recording(rec);
    std::uint32_t metadata_len = 0;
    std::memcpy(&metadata_len, bytes.data() + 28, 4);
    std::size_t labels = 0;
    for (const auto& l : rec.channels()) labels += 2 + l.size();
    EXPECT_EQ(bytes.size(), 32 + metadata_len + 8 + labels +
                                4 * rec.channel_count() * rec.sample_count());
    EXPECT_EQ(serialized_size(rec), bytes.size());
  }
}

TEST(RecordingFormat, SingleZeroSampleGoldenBytes) {
  const EegRecording rec("r1", {"CZ"}, 128.0, 0, {{0.0f}});
  const Bytes expected = {
      'N', 'P', 'D', 'S', 'E', 'E', 'G', '1',  // magic
      0x01, 0x00,                              // version
      0x01, 0x00,                              // channels
      0, 0, 0, 0, 0, 0, 0x60, 0x40,            // 128.0
      0, 0, 0, 0, 0, 0, 0, 0,                  // start time
      6, 0, 0, 0,                              // metadata length
      'i', 'd', '\t', 'r', '1', '\n',          //
      1, 0, 0, 0, 0, 0, 0, 0,                  // samples per channel
      2, 0, 'C', 'Z',                          // label
      0, 0, 0, 0,                              // 0.0f
  };
  EXPECT_EQ(serialize_recording(rec), expected);
}

TEST(RecordingFormat, BadMagic) {
  auto bytes = serialize_recording(small_recording());
  std::memcpy(bytes.data(), "XXXXXXXX", 8);
  try {
    parse_recording(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kBadMagic);
  }
  EXPECT_THROW(parse_recording(Bytes{}), Error);
}

Errc parse_error(const Bytes& bytes) {
  try {
    parse_recording(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kInternal;
}

TEST(RecordingFormat, TruncatedPayloadIsDetected) {
  std::vector<std::vector<float>> rows(2, std::vector<float>(256, 1.0f));
  const EegRecording rec("r2", {"O2", "CZ"}, 128.0, 0, rows);
  auto bytes = serialize_recording(rec);
  // Keep the header plus 100 samples of payload.
  const std::size_t header = bytes.size() - 2 * (2 + 2 + 4 * 256);
  bytes.resize(header + 2 + 2 + 4 * 100);
  EXPECT_EQ(parse_error(bytes), Errc::kTruncatedFile);
}

TEST(RecordingFormat, EveryStrictPrefixIsRejected) {
  const auto bytes = serialize_recording(small_recording());
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    const Bytes prefix(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(len));
    EXPECT_EQ(parse_error(prefix), len < 8 ? Errc::kBadMagic : Errc::kTruncatedFile)
        << "prefix length " << len;
  }
}

TEST(RecordingFormat, InvalidHeaders) {
  const auto good = serialize_recording(small_recording());
  auto patch = [&](std::size_t offset, std::span<const std::uint8_t> value) {
    auto b = good;
    std::memcpy(b.data() + offset, value.data(), value.size());
    return b;
  };
  const std::uint8_t version2[] = {2, 0};
  const std::uint8_t zero16[] = {0, 0};
  double zero = 0.0, negative = -128.0;
  std::uint8_t zero_rate[8], negative_rate[8];
  std::memcpy(zero_rate, &zero, 8);
  std::memcpy(negative_rate, &negative, 8);
  EXPECT_EQ(parse_error(patch(8, version2)), Errc::kInvalidHeader);
  EXPECT_EQ(parse_error(patch(10, zero16)), Errc::kInvalidHeader);
  EXPECT_EQ(parse_error(patch(12, zero_rate)), Errc::kInvalidHeader);
  EXPECT_EQ(parse_error(patch(12, negative_rate)), Errc::kInvalidHeader);

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(parse_error(trailing), Errc::kInvalidHeader);
}

Bytes with_metadata_block(const std::string& block) {
  const EegRecording rec("x", {"CZ"}, 128.0, 0, {{1.0f, 2.0f}});
  const auto good = serialize_recording(rec);
  std::uint32_t old_len = 0;
  std::memcpy(&old_len, good.data() + 28, 4);
  Bytes out(good.begin(), good.begin() + 28);
  const auto len = static_cast<std::uint32_t>(block.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), block.begin(), block.end());
  out.insert(out.end(), good.begin() + 32 + old_len, good.end());
  return out;
}

TEST(RecordingFormat, MetadataDecodeErrors) {
  EXPECT_NO_THROW(parse_recording(with_metadata_block("id\tx\nuser\tbob\n")));
  for (const std::string block :
       {"id\tx\nlat\t91\nlon\t0\n", "id\tx\nlat\t10\n", "id\tx\nno tab here\n",
        "id\tx\nid\ty\n", "id\tx\nbattery\t101\n", "id\tx\nbattery\tfull\n",
        "id\t\n", "id\tx\nuser\t\xff\xfe\n", "id\tx\nlon\tabc\nlat\t1\n"}) {
    EXPECT_EQ(parse_error(with_metadata_block(block)), Errc::kMetadataDecodeError) << block;
  }
}

TEST(RecordingFormat, MissingIdFallsBackToContentHash) {
  const auto bytes = with_metadata_block("user\tbob\n");
  const auto rec = parse_recording(bytes);
  EXPECT_EQ(rec.recording_id(), content_id(bytes));
  EXPECT_EQ(rec.recording_id().rfind("file-", 0), 0u);
  EXPECT_EQ(parse_recording(bytes).recording_id(), rec.recording_id());
  EXPECT_EQ(rec.metadata().user_id, "bob");
}

TEST(RecordingFormat, SplitsConcatenatedFiles) {
  std::mt19937_64 rng(3);
  std::vector<EegRecording> recs;
  Bytes all;
  for (int i = 0; i < 5; ++i) {
    recs.push_back(random_recording(rng));
    const auto b = serialize_recording(recs.back());
    all.insert(all.end(), b.begin(), b.end());
  }
  const auto parts = split_recordings(all);
  ASSERT_EQ(parts.size(), recs.size());
  for (std::size_t i = 0; i < parts.size(); ++i) EXPECT_EQ(parse_recording(parts[i]), recs[i]);
}

TEST(RecordingFormat, KeyValueBlock) {
  const auto lines = parse_key_value_block("a\t1\r\nb\tx y\n\nc\t");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1], (std::pair<std::string, std::string>{"b", "x y"}));
  EXPECT_EQ(lines[2].second, "");
  try {
    parse_key_value_block("b\tx\ty\n");
    ADD_FAILURE() << "TAB inside a value accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMetadataDecodeError);
  }
  EXPECT_EQ(format_key_value_block({{"a", "1"}, {"b", "2"}}), "a\t1\nb\t2\n");
}

TEST(Recording, EnforcesInvariants) {
  auto code = [](auto&& make) {
    try {
      make();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInternal;
  };
  EXPECT_EQ(code([] { EegRecording("a", {}, 128, 0, {}); }), Errc::kInvalidHeader);
  EXPECT_EQ(code([] { EegRecording("a", {"A"}, 0.0, 0, {{1.0f}}); }), Errc::kInvalidHeader);
  EXPECT_EQ(code([] { EegRecording("a", {"A"}, 128, 0, {{}}); }), Errc::kInvalidHeader);
  EXPECT_EQ(code([] { EegRecording("a", {"A", "B"}, 128, 0, {{1.0f}, {1.0f, 2.0f}}); }),
            Errc::kInvalidHeader);
  EXPECT_EQ(code([] { EegRecording("a", {"A", "A"}, 128, 0, {{1.0f}, {1.0f}}); }),
            Errc::kInvalidHeader);
  EXPECT_EQ(code([] { EegRecording("a", {""}, 128, 0, {{1.0f}}); }), Errc::kInvalidHeader);
  RecordingMetadata md;
  md.location = GeoLocation{0.0, 180.5};
  EXPECT_EQ(code([&] { EegRecording("a", {"A"}, 128, 0, {{1.0f}}, md); }),
            Errc::kMetadataDecodeError);
  md.location.reset();
  md.extra["lat"] = "1";
  EXPECT_EQ(code([&] { EegRecording("a", {"A"}, 128, 0, {{1.0f}}, md); }),
            Errc::kMetadataDecodeError);
}

TEST(Recording, DerivedQuantities) {
  const EegRecording rec("a", {"A"}, 128.0, 1'000'000, {std::vector<float>(256, 0.0f)});
  EXPECT_DOUBLE_EQ(rec.duration_seconds(), 2.0);
  EXPECT_EQ(rec.end_time_micros(), 3'000'000);
  const auto part = rec.slice(128, 64);
  EXPECT_EQ(part.sample_count(), 64u);
  EXPECT_EQ(part.start_time_micros(), 2'000'000);
  EXPECT_EQ(part.recording_id(), "a#128");
  EXPECT_THROW(rec.channel_as_double("B"), Error);
}

}  // namespace
}  // namespace npds::eeg
