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

#include "npds/qe/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "npds/dsp/features.hpp"
#include "npds/dsp/fingerprint.hpp"
#include "npds/dsp/ica.hpp"
#include "npds/dsp/spectral.hpp"
#include "npds/error.hpp"

namespace npds::qe {
namespace {

[[noreturn]] void bad_question(const Question& q, const std::string& what) {
  throw Error(Errc::kInvalidQuestion, q.question_id + ": " + what);
}

std::optional<double> parse_number(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

double param_number(const Question& q, const std::string& key, double fallback) {
  auto it = q.params.find(key);
  if (it == q.params.end()) return fallback;
  auto v = parse_number(it->second);
  if (!v) bad_question(q, "param '" + key + "' is not a number");
  return *v;
}

std::size_t param_count(const Question& q, const std::string& key, std::size_t fallback) {
  const double v = param_number(q, key, static_cast<double>(fallback));
  if (v < 0 || v != std::floor(v) || v > 1e6) {
    bad_question(q, "param '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string param_string(const Question& q, const std::string& key,
                         const std::string& fallback) {
  auto it = q.params.find(key);
  return it == q.params.end() ? fallback : it->second;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    if (comma > pos) out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

dsp::FrequencyBand question_band(const Question& q) {
  if (q.params.count("low_hz") || q.params.count("high_hz")) {
    return dsp::FrequencyBand{param_string(q, "band", "custom"),
                              param_number(q, "low_hz", 0.0),
                              param_number(q, "high_hz", 0.0)};
  }
  try {
    return dsp::standard_band(param_string(q, "band", "alpha"));
  } catch (const Error&) {
    bad_question(q, "unknown band '" + param_string(q, "band", "alpha") + "'");
  }
}

std::string question_channel(const Question& q, const eeg::EegRecording& rec) {
  return param_string(q, "channel", rec.channels().front());
}

// Params every schema understands, used to reject typos at install time.
const std::set<std::string>& allowed_params(std::string_view schema) {
  static const std::map<std::string, std::set<std::string>, std::less<>> kAllowed{
      {"band_power", {"band", "low_hz", "high_hz", "channel", "window_seconds", "overlap"}},
      {"spectrogram", {"channel", "window_seconds", "hop_seconds", "peaks"}},
      {"alpha_asymmetry", {"left", "right"}},
      {"drowsiness", {"channel"}},
      {"fingerprint", {"kind", "order", "subbands"}},
      {"ica", {"channels", "max_iterations", "tolerance", "seed"}},
      {"drowsy_places", {"k"}},
  };
  return kAllowed.find(schema)->second;
}

// Minimal structural schema checks.
bool is_num(const Json& j) { return j.is_number(); }
bool is_num_array(const Json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), is_num);
}
bool has_exact_keys(const Json& j, std::initializer_list<std::string_view> keys) {
  if (!j.is_object() || j.size() != keys.size()) return false;
  for (auto k : keys) {
    if (!j.contains(std::string(k))) return false;
  }
  return true;
}

bool matches_schema(std::string_view schema, const Json& p) {
  if (schema == "band_power") {
    return has_exact_keys(p, {"band", "power_uv2"}) && p["band"].is_string() &&
           is_num(p["power_uv2"]);
  }
  if (schema == "spectrogram") {
    if (!has_exact_keys(p, {"frames"}) || !p["frames"].is_array()) return false;
    return std::all_of(p["frames"].begin(), p["frames"].end(), [](const Json& f) {
      return has_exact_keys(f, {"t_start", "peaks"}) && is_num(f["t_start"]) &&
             is_num_array(f["peaks"]);
    });
  }
  if (schema == "alpha_asymmetry") {
    return has_exact_keys(p, {"left", "right", "asymmetry"}) && p["left"].is_string() &&
           p["right"].is_string() && is_num(p["asymmetry"]);
  }
  if (schema == "drowsiness") {
    return has_exact_keys(p, {"p4", "p14", "ratio"}) && is_num(p["p4"]) &&
           is_num(p["p14"]) && is_num(p["ratio"]);
  }
  if (schema == "fingerprint") {
    return has_exact_keys(p, {"kind", "vector"}) && p["kind"].is_string() &&
           is_num_array(p["vector"]);
  }
  if (schema == "ica") {
    if (!has_exact_keys(p, {"n_components", "converged", "unmixing"}) ||
        !p["n_components"].is_number_integer() || !p["converged"].is_boolean() ||
        !p["unmixing"].is_array()) {
      return false;
    }
    const auto k = p["n_components"].get<std::int64_t>();
    if (static_cast<std::int64_t>(p["unmixing"].size()) != k) return false;
    return std::all_of(p["unmixing"].begin(), p["unmixing"].end(), [k](const Json& row) {
      return is_num_array(row) && static_cast<std::int64_t>(row.size()) == k;
    });
  }
  if (schema == "drowsy_places") {
    if (!has_exact_keys(p, {"clusters"}) || !p["clusters"].is_array()) return false;
    return std::all_of(p["clusters"].begin(), p["clusters"].end(), [](const Json& c) {
      return has_exact_keys(c, {"lat", "lon", "mean_ratio", "n"}) && is_num(c["lat"]) &&
             is_num(c["lon"]) && is_num(c["mean_ratio"]) && c["n"].is_number_integer();
    });
  }
  return false;
}

Json spectrogram_payload(const Question& q, const eeg::EegRecording& rec) {
  const auto x = rec.channel_as_double(question_channel(q, rec));
  const auto frames =
      dsp::spectrogram(x, rec.sample_rate_hz(), param_number(q, "window_seconds", 2.0),
                       param_number(q, "hop_seconds", 1.0));
  const std::size_t peaks = param_count(q, "peaks", 3);
  Json list = Json::array();
  for (const auto& frame : frames) {
    list.push_back(Json{{"t_start", frame.t_start_seconds},
                        {"peaks", dsp::spectral_peaks(frame.psd, peaks)}});
  }
  return Json{{"frames", std::move(list)}};
}

Json ica_payload(const Question& q, const eeg::EegRecording& rec) {
  std::vector<std::string> channels = split_list(param_string(q, "channels", ""));
  if (channels.empty()) channels = rec.channels();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(channels.size()),
                    static_cast<Eigen::Index>(rec.sample_count()));
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto row = rec.channel_as_double(channels[c]);
    for (std::size_t n = 0; n < row.size(); ++n) {
      x(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(n)) = row[n];
    }
  }
  const auto result = dsp::fastica(
      x, static_cast<int>(param_count(q, "max_iterations", dsp::kDefaultIcaMaxIterations)),
      param_number(q, "tolerance", dsp::kDefaultIcaTolerance),
      static_cast<std::uint64_t>(param_count(q, "seed", 0)));
  Json unmixing = Json::array();
  for (Eigen::Index i = 0; i < result.unmixing_matrix.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < result.unmixing_matrix.cols(); ++j) {
      row.push_back(result.unmixing_matrix(i, j));
    }
    unmixing.push_back(std::move(row));
  }
  return Json{{"n_components", channels.size()},
              {"converged", result.converged},
              {"unmixing", std::move(unmixing)}};
}

}  // namespace

const std::vector<std::string>& known_schemas() {
  static const std::vector<std::string> kSchemas{
      "band_power", "spectrogram", "alpha_asymmetry", "drowsiness",
      "fingerprint", "ica", "drowsy_places"};
  return kSchemas;
}

bool is_known_schema(std::string_view schema_id) {
  const auto& all = known_schemas();
  return std::find(all.begin(), all.end(), schema_id) != all.end();
}

bool is_raw_schema(std::string_view schema_id) {
  return is_known_schema(schema_id) && schema_id != "drowsy_places";
}

void validate_question_shape(const Question& q, const QuestionLookup& lookup) {
  if (!is_known_schema(q.output_schema_id)) {
    throw Error(Errc::kUnknownSchema,
                "output schema '" + q.output_schema_id + "' is not registered");
  }
  for (const auto& [key, value] : q.params) {
    if (!allowed_params(q.output_schema_id).count(key)) {
      bad_question(q, "unknown param '" + key + "' for " + q.output_schema_id);
    }
  }
  if (is_raw_schema(q.output_schema_id)) {
    if (!q.reads_raw()) bad_question(q, q.output_schema_id + " requires the RAW input");
  } else {
    if (q.reads_raw()) bad_question(q, "drowsy_places does not read raw data");
    const auto deps = q.dependencies();
    if (deps.size() != 1) bad_question(q, "drowsy_places takes exactly one input");
    auto dep = lookup(deps.front());
    if (dep && dep->output_schema_id != "drowsiness") {
      bad_question(q, "drowsy_places input must produce the drowsiness schema");
    }
    if (param_count(q, "k", 5) == 0) bad_question(q, "k must be at least 1");
  }

  // Numeric params must parse; the value ranges are enforced at compute time.
  for (const auto* key : {"low_hz", "high_hz", "window_seconds", "overlap", "hop_seconds",
                          "tolerance"}) {
    param_number(q, key, 0.0);
  }
  for (const auto* key : {"peaks", "order", "subbands", "max_iterations", "seed"}) {
    param_count(q, key, 0);
  }
  if (q.output_schema_id == "band_power") question_band(q);
  if (q.output_schema_id == "fingerprint") {
    const auto kind = param_string(q, "kind", "ar");
    if (kind != "ar" && kind != "alpha_subbands") bad_question(q, "unknown fingerprint kind");
  }
}

std::size_t count_numeric_values(const Json& value) {
  if (value.is_number()) return 1;
  if (value.is_array() || value.is_object()) {
    std::size_t n = 0;
    for (const auto& item : value) n += count_numeric_values(item);
    return n;
  }
  return 0;
}

void validate_payload(std::string_view schema_id, const Json& payload) {
  if (!matches_schema(schema_id, payload)) {
    throw Error(Errc::kPayloadRejected,
                "payload does not match schema '" + std::string(schema_id) + "'");
  }
  const std::size_t n = count_numeric_values(payload);
  if (n > kMaxPayloadValues) {
    throw Error(Errc::kPayloadRejected,
                "payload carries " + std::to_string(n) + " values; the cap is " +
                    std::to_string(kMaxPayloadValues));
  }
}

Json compute_raw_payload(const Question& q, const eeg::EegRecording& rec) {
  const auto& schema = q.output_schema_id;
  if (schema == "band_power") {
    const auto band = question_band(q);
    const auto x = rec.channel_as_double(question_channel(q, rec));
    const auto psd = dsp::psd_welch(x, rec.sample_rate_hz(),
                                    param_number(q, "window_seconds", dsp::kDefaultWindowSeconds),
                                    param_number(q, "overlap", dsp::kDefaultOverlap));
    return Json{{"band", band.name}, {"power_uv2", dsp::band_power(psd, band)}};
  }
  if (schema == "spectrogram") return spectrogram_payload(q, rec);
  if (schema == "alpha_asymmetry") {
    const auto left = param_string(q, "left", "F3");
    const auto right = param_string(q, "right", "F4");
    return Json{{"left", left}, {"right", right},
                {"asymmetry", dsp::alpha_asymmetry(rec, left, right)}};
  }
  if (schema == "drowsiness") {
    const auto d = dsp::drowsiness_index(rec, question_channel(q, rec));
    return Json{{"p4", d.p4}, {"p14", d.p14}, {"ratio", d.ratio}};
  }
  if (schema == "fingerprint") {
    const auto kind = param_string(q, "kind", "ar");
    const auto fp = kind == "ar"
                        ? dsp::ar_fingerprint(rec, param_count(q, "order", dsp::kDefaultArOrder))
                        : dsp::alpha_subband_fingerprint(rec, param_count(q, "subbands", 5));
    return Json{{"kind", dsp::fingerprint_kind_name(fp.kind)}, {"vector", fp.vector}};
  }
  if (schema == "ica") return ica_payload(q, rec);
  throw Error(Errc::kUnknownSchema, "schema '" + schema + "' has no raw extractor");
}

}  // namespace npds::qe
