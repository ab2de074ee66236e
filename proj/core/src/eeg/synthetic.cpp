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

#include "npds/eeg/synthetic.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "npds/eeg/format.hpp"
#include "npds/error.hpp"

namespace npds::eeg {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t channel,
                          std::size_t component) {
  return splitmix64(splitmix64(seed ^ splitmix64(channel + 1)) ^
                    (component + 0x51ULL));
}

double sinusoid_at(const Sinusoid& s, std::size_t n, double fs) {
  return s.amplitude_uv *
         std::sin(2.0 * std::numbers::pi * s.frequency_hz *
                      static_cast<double>(n) / fs +
                  s.phase_rad);
}

void add_ar(std::vector<double>& acc, const ArProcess& ar,
            std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, ar.noise_stdev);
  const std::size_t p = ar.coefficients.size();
  std::deque<double> history(p, 0.0);  // history[0] = x[t-1]
  const std::size_t total = kArBurnInSamples + acc.size();
  for (std::size_t t = 0; t < total; ++t) {
    double x = noise(rng);
    for (std::size_t i = 0; i < p; ++i) x += ar.coefficients[i] * history[i];
    if (p > 0) {
      history.pop_back();
      history.push_front(x);
    }
    if (t >= kArBurnInSamples) acc[t - kArBurnInSamples] += x;
  }
}

[[noreturn]] void bad_spec(const std::string& what) {
  throw Error(Errc::kBadSpec, what);
}

std::vector<double> parse_numbers(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() ||
        !std::isfinite(v)) {
      bad_spec("'" + std::string(key) + "': not a number: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

// "a b c ; d e f" -> {{a, b, c}, {d, e, f}}
std::vector<std::vector<double>> parse_groups(std::string_view key,
                                              std::string_view text) {
  std::vector<std::vector<double>> groups;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto semi = text.find(';', pos);
    if (semi == std::string_view::npos) semi = text.size();
    auto numbers = parse_numbers(key, text.substr(pos, semi - pos));
    if (!numbers.empty()) groups.push_back(std::move(numbers));
    pos = semi + 1;
  }
  return groups;
}

double parse_one(std::string_view key, std::string_view text) {
  auto v = parse_numbers(key, text);
  if (v.size() != 1) bad_spec("'" + std::string(key) + "' expects one number");
  return v.front();
}

}  // namespace

bool is_stable_ar(std::span<const double> coefficients) {
  // Polynomial 1 + sum c_k z^-k with c_k = -a_k; step down through the
  // reflection coefficients.
  std::vector<double> c(coefficients.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = -coefficients[k];
  for (std::size_t m = c.size(); m >= 1; --m) {
    const double k = c[m - 1];
    if (!std::isfinite(k) || std::abs(k) >= 1.0) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      next[i] = (c[i] - k * c[m - 2 - i]) / denom;
    }
    c = std::move(next);
  }
  return true;
}

EegRecording generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.channels.empty() || spec.sample_count == 0 ||
      !(spec.sample_rate_hz > 0.0)) {
    throw Error(Errc::kBadSpec,
                "synthetic spec needs channels, samples and a positive rate");
  }
  const double fs = spec.sample_rate_hz;
  std::vector<ChannelLabel> labels;
  std::vector<std::vector<float>> rows;
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const auto& ch = spec.channels[c];
    std::vector<double> acc(spec.sample_count, 0.0);
    for (std::size_t k = 0; k < ch.components.size(); ++k) {
      std::mt19937_64 rng(stream_seed(seed, c, k));
      const auto& component = ch.components[k];
      if (const auto* s = std::get_if<Sinusoid>(&component)) {
        for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += sinusoid_at(*s, n, fs);
      } else if (const auto* seg = std::get_if<SinusoidSegment>(&component)) {
        for (std::size_t n = 0; n < acc.size(); ++n) {
          const double t = static_cast<double>(n) / fs;
          if (t >= seg->start_s && t < seg->end_s) {
            acc[n] += sinusoid_at(seg->sinusoid, n, fs);
          }
        }
      } else if (const auto* ar = std::get_if<ArProcess>(&component)) {
        if (!is_stable_ar(ar->coefficients)) {
          throw Error(Errc::kUnstableArModel,
                      "AR model for channel " + ch.label +
                          " has a root on or outside the unit circle");
        }
        add_ar(acc, *ar, rng);
      } else if (const auto* wn = std::get_if<WhiteNoise>(&component)) {
        std::normal_distribution<double> noise(0.0, wn->stdev);
        for (auto& v : acc) v += noise(rng);
      }
    }
    labels.push_back(ch.label);
    rows.emplace_back(acc.begin(), acc.end());
  }

  std::string id = spec.recording_id;
  if (id.empty()) {
    // Derive from the generated content so that distinct specs sharing a seed
    // still get distinct ids.
    std::uint64_t h = splitmix64(seed);
    for (const auto& row : rows) {
      for (float v : row) h = splitmix64(h ^ std::bit_cast<std::uint32_t>(v));
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    id = "syn-" + std::string(hex, 16);
  }
  return EegRecording(std::move(id), std::move(labels), fs,
                      spec.start_time_micros, std::move(rows), spec.metadata);
}

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  KeyValueLines lines;
  try {
    lines = parse_key_value_block(text);
  } catch (const Error& e) {
    bad_spec(e.what());
  }
  SyntheticSpec spec;
  double duration_s = 0.0;
  std::optional<double> lat;
  std::optional<double> lon;
  std::vector<std::pair<std::string, std::string>> channel_lines;

  for (const auto& [key, value] : lines) {
    if (key == "sample_rate_hz") {
      spec.sample_rate_hz = parse_one(key, value);
    } else if (key == "duration_s") {
      duration_s = parse_one(key, value);
    } else if (key == "start_time_micros") {
      spec.start_time_micros = static_cast<std::int64_t>(parse_one(key, value));
    } else if (key == "id") {
      spec.recording_id = value;
    } else if (key == "channels") {
      std::size_t pos = 0;
      while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string::npos) comma = value.size();
        std::string label = value.substr(pos, comma - pos);
        if (label.empty()) bad_spec("empty channel label in 'channels'");
        for (const auto& ch : spec.channels) {
          if (ch.label == label) bad_spec("duplicate channel label '" + label + "'");
        }
        spec.channels.push_back(ChannelSpec{label, {}});
        pos = comma + 1;
      }
    } else if (key.rfind("meta.", 0) == 0) {
      const std::string field = key.substr(5);
      if (field == "user") {
        spec.metadata.user_id = value;
      } else if (field == "description") {
        spec.metadata.description = value;
      } else if (field == "battery") {
        spec.metadata.battery_level_percent =
            static_cast<int>(parse_one(key, value));
      } else if (field == "lat") {
        lat = parse_one(key, value);
      } else if (field == "lon") {
        lon = parse_one(key, value);
      } else {
        spec.metadata.extra[field] = value;
      }
    } else if (key.find('.') != std::string::npos) {
      channel_lines.emplace_back(key, value);
    } else {
      bad_spec("unknown spec key '" + key + "'");
    }
  }
  if (lat.has_value() != lon.has_value()) bad_spec("meta.lat and meta.lon go together");
  if (lat) spec.metadata.location = GeoLocation{*lat, *lon};
  if (spec.channels.empty()) bad_spec("spec declares no channels");
  if (!(spec.sample_rate_hz > 0.0)) bad_spec("sample_rate_hz must be positive");
  if (!(duration_s > 0.0)) bad_spec("duration_s must be positive");
  spec.sample_count =
      static_cast<std::size_t>(std::llround(duration_s * spec.sample_rate_hz));
  if (spec.sample_count == 0) bad_spec("spec yields zero samples");

  for (const auto& [key, value] : channel_lines) {
    const auto dot = key.rfind('.');
    const std::string label = key.substr(0, dot);
    const std::string kind = key.substr(dot + 1);
    ChannelSpec* channel = nullptr;
    for (auto& ch : spec.channels) {
      if (ch.label == label) channel = &ch;
    }
    if (channel == nullptr) bad_spec("component for undeclared channel '" + label + "'");
    for (const auto& g : parse_groups(key, value)) {
      if (kind == "sin") {
        if (g.size() < 2 || g.size() > 3) bad_spec(key + ": expects amplitude frequency [phase]");
        channel->components.push_back(Sinusoid{g[0], g[1], g.size() == 3 ? g[2] : 0.0});
      } else if (kind == "segment") {
        if (g.size() != 5) bad_spec(key + ": expects amplitude frequency phase start end");
        channel->components.push_back(
            SinusoidSegment{Sinusoid{g[0], g[1], g[2]}, g[3], g[4]});
      } else if (kind == "ar") {
        if (g.size() < 2) bad_spec(key + ": expects noise_stdev a1 [a2 ...]");
        ArProcess ar{{g.begin() + 1, g.end()}, g[0]};
        if (!is_stable_ar(ar.coefficients)) {
          bad_spec(key + ": unstable AR model (UnstableArModel)");
        }
        channel->components.push_back(std::move(ar));
      } else if (kind == "noise") {
        if (g.size() != 1) bad_spec(key + ": expects stdev");
        channel->components.push_back(WhiteNoise{g[0]});
      } else {
        bad_spec("unknown component kind '" + kind + "'");
      }
    }
  }
  try {
    validate_metadata(spec.metadata);
  } catch (const Error& e) {
    bad_spec(e.what());
  }
  return spec;
}

}  // namespace npds::eeg
