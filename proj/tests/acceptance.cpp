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

// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "cli/cli.hpp"
#include "npds/agg/aggregator.hpp"
#include "npds/agg/fixed_point.hpp"
#include "npds/agg/masking.hpp"
#include "npds/api/http_client.hpp"
#include "npds/api/http_server.hpp"
#include "npds/api/service.hpp"
#include "npds/dsp/features.hpp"
#include "npds/dsp/fingerprint.hpp"
#include "npds/dsp/ica.hpp"
#include "npds/dsp/spectral.hpp"
#include "npds/eeg/format.hpp"
#include "npds/eeg/synthetic.hpp"
#include "npds/qe/question.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <httplib.h>

namespace npds::acceptance {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using npds::testing::channel;
using npds::testing::spec;

constexpr std::int64_t kSecond = 1'000'000;
const std::string kOwner = "acceptance owner credential";

struct Verdict {
  bool pass = true;
  std::string failures;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    failures += (pass ? "" : "; ") + what;
    pass = false;
  }
};

struct Criterion {
  std::string name;
  double limit_seconds;
  std::function<void(Verdict&)> body;
};

eeg::EegRecording ar_recording(const std::vector<double>& a, double seconds, std::uint64_t seed) {
  return eeg::generate_synthetic(spec(128, seconds, {channel("O2", {eeg::ArProcess{a, 1.0}})}),
                                 seed);
}

void parseval_band_power(Verdict& v) {
  const auto rec = npds::testing::tones("sine", {{10, 10, 0}}, 128, 8);
  const auto x = rec.channel_as_double(0);
  const auto psd = dsp::psd_welch(x, 128.0);
  const double alpha = dsp::band_power(psd, dsp::bands::kAlpha);
  const double var = npds::testing::variance(x);
  v.check(std::abs(alpha - 50.0) <= 0.05 * 50.0, "alpha power " + std::to_string(alpha));
  v.check(std::abs(psd.total_power() - var) <= 0.03 * var,
          "total " + std::to_string(psd.total_power()) + " vs variance " + std::to_string(var));
  v.detail << "alpha=" << alpha << " uV^2, total/var=" << psd.total_power() / var;
}

void ar_recovery(Verdict& v) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto fp = dsp::ar_fingerprint(ar_recording({0.75, -0.5}, 60, seed), 2);
    worst = std::max({worst, std::abs(fp.vector[0] - 0.75), std::abs(fp.vector[1] + 0.5)});
  }
  v.check(worst <= 0.05, "max error " + std::to_string(worst));
  v.detail << "max |error| over 20 seeds = " << worst;
}

void identification(Verdict& v) {
  std::vector<dsp::Fingerprint> enrolled, probes;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto rec = ar_recording(npds::testing::random_stable_ar(500 + s, 6), 120, 900 + s);
    auto first = dsp::ar_fingerprint(rec.slice(0, 60 * 128), 6);
    auto second = dsp::ar_fingerprint(rec.slice(60 * 128, 60 * 128), 6);
    first.subject_id = second.subject_id = "subject-" + std::to_string(s);
    enrolled.push_back(first);
    probes.push_back(second);
  }
  const auto model = dsp::IdentityModel::enroll(enrolled);
  int correct = 0;
  for (const auto& p : probes) correct += model.identify(p).subject_id == p.subject_id;
  v.check(correct >= 8, "accuracy " + std::to_string(correct) + "/10");

  const auto shared = npds::testing::random_stable_ar(77, 6);
  int control = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    auto a = dsp::ar_fingerprint(ar_recording(shared, 60, 3 * t), 6);
    auto b = dsp::ar_fingerprint(ar_recording(shared, 60, 3 * t + 1), 6);
    const auto probe = dsp::ar_fingerprint(ar_recording(shared, 60, 3 * t + 2), 6);
    a.subject_id = "a";
    b.subject_id = "b";
    control += dsp::IdentityModel::enroll({a, b}).identify(probe).subject_id == "a";
  }
  v.check(control >= 35 && control <= 65, "control " + std::to_string(control) + "/100");
  v.detail << "accuracy " << correct * 10 << "%, identical-generator control " << control << "%";
}

void ica_unmixing(Verdict& v) {
  const Eigen::Index n = 128 * 20;
  Eigen::MatrixXd s(2, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double time = static_cast<double>(t) / 128.0;
    s(0, t) = std::sin(2.0 * std::numbers::pi * 5.0 * time);
    s(1, t) = 2.0 * (1.3 * time - std::floor(1.3 * time)) - 1.0;
  }
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.5, 0.5, 1.0;
  const Eigen::MatrixXd x = a * s;
  const auto r = dsp::fastica(x);
  auto corr = [](const Eigen::RowVectorXd& p, const Eigen::RowVectorXd& q) {
    const Eigen::RowVectorXd pc = p.array() - p.mean();
    const Eigen::RowVectorXd qc = q.array() - q.mean();
    return std::abs(pc.dot(qc)) / std::sqrt(pc.squaredNorm() * qc.squaredNorm());
  };
  double weakest = 1.0;
  for (Eigen::Index i = 0; i < 2; ++i) {
    int matched = 0;
    double best = 0.0;
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double c = corr(r.sources.row(i), s.row(j));
      matched += c > 0.95;
      best = std::max(best, c);
    }
    v.check(matched == 1, "source " + std::to_string(i) + " matches " + std::to_string(matched));
    weakest = std::min(weakest, best);
  }
  const Eigen::MatrixXd centered = x.colwise() - r.mean;
  const Eigen::MatrixXd cov = dsp::row_covariance(r.whitening_matrix * centered);
  const double dev = (cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
  v.check(dev <= 1e-6, "whitened covariance deviation " + std::to_string(dev));
  v.check(r.converged, "not converged");
  v.detail << "min |corr|=" << weakest << ", whitening deviation=" << dev;
}

std::vector<std::uint8_t> recording_bytes(const std::string& id, std::int64_t start,
                                          std::uint64_t seed) {
  return eeg::serialize_recording(eeg::generate_synthetic(
      npds::testing::starting_at(
          npds::testing::with_location(
              spec(128, 10,
                   {channel("F3", {eeg::Sinusoid{5, 10, 0}, eeg::WhiteNoise{1}}),
                    channel("F4", {eeg::Sinusoid{7, 10, 0}, eeg::WhiteNoise{1}}),
                    channel("O2", {eeg::Sinusoid{4, 4, 0}, eeg::WhiteNoise{1}})},
                   id),
              40.7, -74.0),
          start),
      seed));
}

qe::Question question(std::string id, std::string schema,
                      std::map<std::string, std::string> params = {},
                      std::vector<std::string> inputs = {"RAW"}) {
  qe::Question q;
  q.question_id = std::move(id);
  q.output_schema_id = std::move(schema);
  q.inputs = std::move(inputs);
  q.params = std::move(params);
  return q;
}

struct Node {
  explicit Node(api::PdsConfig config) : service(std::move(config)), server(service) {
    server.bind("127.0.0.1", 0);
    server.start();
  }
  static api::PdsConfig config() {
    api::PdsConfig c;
    c.owner_credential = kOwner;
    return c;
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(server.port()); }
  std::string token_for(const std::set<std::string>& scopes, const std::string& client) {
    const auto g = api::PdsClient(url(), "").request_grant(client, scopes);
    return api::PdsClient(url(), kOwner).decide_grant(g.grant_id, true)["access_token"];
  }
  api::PdsService service;
  api::HttpServer server;
};

void privacy_boundary(Verdict& v) {
  Node node(Node::config());
  api::PdsClient owner(node.url(), kOwner);
  const std::vector<qe::Question> questions{
      question("bp", "band_power", {{"band", "alpha"}}),
      question("sg", "spectrogram", {{"channel", "O2"}}),
      question("as", "alpha_asymmetry"),
      question("dr", "drowsiness", {{"channel", "O2"}}),
      question("fa", "fingerprint"),
      question("fs", "fingerprint", {{"kind", "alpha_subbands"}}),
      question("ic", "ica"),
      question("pl", "drowsy_places", {}, {"dr"}),
  };
  std::set<std::string> scopes{"upload", "aggregate:participate"};
  for (const auto& q : questions) {
    owner.install_question(q);
    scopes.insert("q:" + q.question_id);
  }

  // Sentinel block spliced into every channel of every stored recording.
  std::vector<float> sentinel;
  for (int i = 0; i < 32; ++i) sentinel.push_back(27182.0f + 0.25f * static_cast<float>(i * i));
  for (int r = 0; r < 3; ++r) {
    const auto rec = eeg::parse_recording(recording_bytes("rec" + std::to_string(r),
                                                          r * 100 * kSecond, r + 1));
    std::vector<std::vector<float>> samples;
    for (std::size_t c = 0; c < rec.channels().size(); ++c) {
      const auto ch = rec.channel(c);
      samples.emplace_back(ch.begin(), ch.end());
      std::copy(sentinel.begin(), sentinel.end(), samples.back().begin() + 100 + 50 * c);
    }
    owner.upload(eeg::serialize_recording(eeg::EegRecording(
        rec.recording_id(), rec.channels(), rec.sample_rate_hz(), rec.start_time_micros(),
        samples, rec.metadata())));
  }
  owner.run_compute();
  api::Provisioning p{"sess", "me", {"me", "p2", "p3"}, {}};
  p.pair_seeds = {{"p2", agg::random_pair_seed()}, {"p3", agg::random_pair_seed()}};
  owner.provision(p);
  const auto announcement =
      api::to_json(agg::make_session("sess", "dr", "ratio", {"me", "p2", "p3"}).announcement())
          .dump();

  const auto token = node.token_for(scopes, "max-scope");
  httplib::Client http("127.0.0.1", node.server.port());
  const httplib::Headers h{{"Authorization", "Bearer " + token}};
  const auto upload = recording_bytes("fresh", 900 * kSecond, 9);
  const std::string upload_body(upload.begin(), upload.end());

  struct Call {
    std::string method, path, body;
  };
  std::vector<Call> calls;
  for (const char* path : {"/v1/recordings", "/v1/recordings/export", "/v1/grants",
                           "/v1/questions", "/v1/audit", "/v1/audit?since=0", "/v1/nonexistent",
                           "/v1/recordings/rec0", "/v1/grants/grant-1"}) {
    calls.push_back({"GET", path, ""});
  }
  for (int r = 0; r < 3; ++r) {
    calls.push_back({"GET", "/v1/recordings/rec" + std::to_string(r) + "/raw", ""});
  }
  for (const auto& q : questions) {
    calls.push_back({"GET", "/v1/answers/" + q.question_id, ""});
    calls.push_back({"GET", "/v1/answers/" + q.question_id + "?subject=rec0,rec1&from=0", ""});
  }
  calls.push_back({"POST", "/v1/recordings", upload_body});
  calls.push_back({"POST", "/v1/grants", R"({"client_id":"max-scope","scopes":["upload"]})"});
  calls.push_back({"POST", "/v1/grants/grant-1/decision", R"({"approve":true})"});
  calls.push_back({"POST", "/v1/questions", qe::to_json(questions[0]).dump()});
  calls.push_back({"POST", "/v1/compute/run", ""});
  calls.push_back({"POST", "/v1/aggregate/provision", api::to_json(p).dump()});
  calls.push_back({"POST", "/v1/aggregate/sessions", announcement});
  calls.push_back({"POST", "/v1/aggregate/sessions/sess/contribute", ""});
  calls.push_back({"DELETE", "/v1/recordings", R"({"all":true})"});
  calls.push_back({"DELETE", "/v1/recordings", R"({"recording_ids":["rec1"]})"});
  calls.push_back({"DELETE", "/v1/grants/grant-1", ""});
  calls.push_back({"PUT", "/v1/recordings", "x"});
  calls.push_back({"PATCH", "/v1/grants/grant-1", "{}"});

  std::size_t leaks = 0, unaudited = 0;
  for (const auto& c : calls) {
    const auto before = node.service.audit_log().last_seq();
    httplib::Result r;
    if (c.method == "GET") r = http.Get(c.path, h);
    if (c.method == "POST") r = http.Post(c.path, h, c.body, "application/json");
    if (c.method == "DELETE") r = http.Delete(c.path, h, c.body, "application/json");
    if (c.method == "PUT") r = http.Put(c.path, h, c.body, "text/plain");
    if (c.method == "PATCH") r = http.Patch(c.path, h, c.body, "application/json");
    if (!r) {
      v.check(false, "no response for " + c.method + " " + c.path);
      continue;
    }
    if (node.service.audit_log().last_seq() != before + 1) ++unaudited;
    const auto& body = r->body;
    for (std::size_t i = 0; i + 4 <= sentinel.size(); ++i) {
      const auto* bytes = reinterpret_cast<const char*>(&sentinel[i]);
      if (std::search(body.begin(), body.end(), bytes, bytes + 4 * sizeof(float)) != body.end()) {
        ++leaks;
        break;
      }
    }
  }
  v.check(leaks == 0, std::to_string(leaks) + " responses carried sentinel samples");
  v.check(unaudited == 0, std::to_string(unaudited) + " requests without exactly one audit entry");

  const auto start = node.service.audit_log().last_seq();
  std::vector<std::thread> threads;
  std::atomic<int> answered{0};
  for (int t = 0; t < 100; ++t) {
    threads.emplace_back([&, t] {
      httplib::Client c("127.0.0.1", node.server.port());
      const auto r = t % 2 ? c.Get("/v1/answers/bp", h) : c.Get("/v1/recordings/export", h);
      if (r) ++answered;
    });
  }
  for (auto& th : threads) th.join();
  const auto entries = node.service.audit_log().since(start);
  bool gap_free = entries.size() == 100;
  for (std::size_t i = 0; gap_free && i < entries.size(); ++i) {
    gap_free = entries[i].seq == start + static_cast<std::int64_t>(i) + 1;
  }
  v.check(answered == 100, std::to_string(answered) + "/100 concurrent requests answered");
  v.check(gap_free, "audit seq has gaps under concurrency");
  v.detail << calls.size() << " endpoint calls, 0 sentinel hits, 100 concurrent requests, seq "
           << start + 1 << ".." << node.service.audit_log().last_seq();
}

void revocation_and_deletion(Verdict& v) {
  Node node(Node::config());
  api::PdsClient owner(node.url(), kOwner);
  owner.install_question(question("dr", "drowsiness", {{"channel", "O2"}}));
  owner.upload(recording_bytes("keep", 0, 1));
  owner.upload(recording_bytes("gone", 100 * kSecond, 2));
  owner.run_compute();

  const auto token = node.token_for({"q:dr", "upload"}, "app");
  api::PdsClient app(node.url(), token);
  v.check(app.answers("dr")["answers"].size() == 2, "answers before revocation");
  owner.revoke_grant("grant-1");
  const auto revoked_at = node.service.audit_log().last_seq();
  int denied = 0, attempts = 0;
  const std::vector<std::function<void()>> after{
      [&] { app.answers("dr"); },
      [&] { app.upload(recording_bytes("late", 500 * kSecond, 3)); },
      [&] { app.list_questions(); },
      [&] { app.answers("dr", {std::set<std::string>{"keep"}, {}, {}}); },
  };
  for (const auto& call : after) {
    ++attempts;
    try {
      call();
    } catch (const Error& e) {
      denied += e.code() == Errc::kUnauthorized;
    }
  }
  bool all_denied_in_log = true;
  for (const auto& e : node.service.audit_log().since(revoked_at)) {
    all_denied_in_log &= e.outcome == api::Outcome::kDenied;
  }
  v.check(denied == attempts, std::to_string(denied) + "/" + std::to_string(attempts) +
                                  " post-revocation requests refused");
  v.check(all_denied_in_log, "post-revocation audit entries not all DENIED");

  // A pending aggregation share derived from the deleted recording.
  const auto aggregator = node.token_for({"aggregate:participate"}, "aggregator");
  api::Provisioning p{"s", "me", {"me", "p2", "p3"}, {}};
  p.pair_seeds = {{"p2", agg::random_pair_seed()}, {"p3", agg::random_pair_seed()}};
  owner.provision(p);
  api::HttpParticipantChannel channel("me", node.url(), aggregator);
  channel.open(agg::make_session("s", "dr", "ratio", {"me", "p2", "p3"}).announcement());
  channel.contribute("s");

  const auto gone = recording_bytes("gone", 100 * kSecond, 2);
  const auto keep = recording_bytes("keep", 0, 1);
  v.check(owner.delete_recordings({"gone"}) == 1, "delete count");
  const auto answers = owner.answers("dr")["answers"];
  v.check(answers.size() == 1 && answers[0]["subject"]["id"] == "keep",
          "answers still reference the deleted recording");
  v.check(owner.export_all() == keep, "export still contains the deleted recording");
  try {
    owner.raw("gone");
    v.check(false, "raw download of deleted recording succeeded");
  } catch (const Error& e) {
    v.check(e.code() == Errc::kUnknownRecording, "raw download error");
  }
  try {
    channel.contribute("s");
    v.check(false, "aggregation share derived from deleted data was released");
  } catch (const Error& e) {
    v.check(e.code() == Errc::kUnknownSession, "contribute after delete");
  }
  owner.run_compute();
  v.check(owner.answers("dr")["answers"].size() == 1, "sweep resurrected deleted answers");
  v.detail << denied << "/" << attempts << " post-revocation requests DENIED; answers, export, "
           << "raw and aggregation reflect the deletion";
}

class LocalParticipant : public agg::ParticipantChannel {
 public:
  LocalParticipant(std::string id, double value, std::uint32_t index, std::uint32_t n,
                   std::map<std::uint32_t, agg::PairSeed> seeds)
      : id_(std::move(id)), value_(value), index_(index), n_(n), seeds_(std::move(seeds)) {}
  std::string participant_id() const override { return id_; }
  void open(const agg::SessionAnnouncement&) override {}
  agg::MaskedShare contribute(const std::string& session_id) override {
    return {id_, agg::apply_pairwise_masks(agg::encode_fixed(value_), session_id, index_, n_,
                                           seeds_)};
  }

 private:
  std::string id_;
  double value_;
  std::uint32_t index_, n_;
  std::map<std::uint32_t, agg::PairSeed> seeds_;
};

void aggregation(Verdict& v) {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  int exact = 0, garbage = 0, trials = 0;
  for (std::uint32_t n : {3u, 5u, 10u}) {
    for (int trial = 0; trial < 100; ++trial, ++trials) {
      std::vector<std::string> ids;
      for (std::uint32_t i = 0; i < n; ++i) ids.push_back("pds-" + std::to_string(i));
      auto session = agg::make_session("t" + std::to_string(n) + "-" + std::to_string(trial),
                                       "q", "x", ids);
      std::vector<std::map<std::uint32_t, agg::PairSeed>> seeds(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) seeds[i][j] = seeds[j][i] = agg::random_pair_seed();
      }
      std::vector<std::unique_ptr<LocalParticipant>> members;
      std::vector<agg::ParticipantChannel*> channels;
      std::int64_t plain = 0;
      for (std::uint32_t i = 0; i < n; ++i) {
        const double value = u(rng);
        plain += std::llround(value * static_cast<double>(agg::kFixedPointScale));
        members.push_back(std::make_unique<LocalParticipant>(ids[i], value,
                                                             session.index_of(ids[i]), n,
                                                             seeds[session.index_of(ids[i])]));
        channels.push_back(members.back().get());
      }
      const double truth = static_cast<double>(plain) / agg::kFixedPointScale;
      exact += agg::run_session(session, channels).sum == truth;

      std::vector<agg::MaskedShare> shares;
      for (auto* c : channels) shares.push_back(c->contribute(session.session_id));
      shares.erase(shares.begin() + static_cast<std::ptrdiff_t>(rng() % n));
      garbage += agg::decode_fixed(agg::sum_shares(shares), n - 1) != truth;
    }
  }
  v.check(exact == trials, std::to_string(exact) + "/" + std::to_string(trials) + " exact");
  v.check(garbage == trials,
          std::to_string(garbage) + "/" + std::to_string(trials) + " withheld sums differ");
  bool refused = false;
  try {
    cli::demo_aggregate({1.0, 2.0});
  } catch (const Error& e) {
    refused = e.code() == Errc::kMinimumGroupSize;
  }
  v.check(refused, "N=2 not refused");
  v.detail << exact << "/" << trials << " exact, " << garbage << "/" << trials
           << " undecodable with one share withheld, N=2 refused";
}

void end_to_end(Verdict& v) {
  const auto dir = fs::temp_directory_path() /
                   ("npds-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  Node node(Node::config());
  std::ofstream(dir / "owner.cred") << kOwner;
  auto npds = [&](std::vector<std::string> args) {
    std::vector<std::string> full{"--server", node.url(), "--owner-cred",
                                  (dir / "owner.cred").string(), "--format", "json"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = cli::run(full, out, err);
    if (code != 0) v.check(false, args.front() + ": " + err.str());
    return out.str();
  };

  // L1 (51.5074, -0.1278) carries a strong 4 Hz rhythm, L2 (48.8566, 2.3522)
  // a strong 14 Hz rhythm.
  struct Place {
    std::string id, freq, lat, lon, start;
  };
  for (const auto& pl : {Place{"drowsy", "4", "51.5074", "-0.1278", "0"},
                         Place{"alert", "14", "48.8566", "2.3522", "3600000000"}}) {
    std::ofstream(dir / (pl.id + ".spec"))
        << "sample_rate_hz\t128\nduration_s\t30\nid\t" << pl.id << "\nstart_time_micros\t"
        << pl.start << "\nchannels\tO2\nO2.sin\t12 " << pl.freq << " 0\nO2.noise\t1\n"
        << "meta.user\talice\nmeta.lat\t" << pl.lat << "\nmeta.lon\t" << pl.lon << "\n";
    npds({"generate", "--spec", (dir / (pl.id + ".spec")).string(), "--seed", "1", "--out",
          (dir / (pl.id + ".eeg")).string()});
  }
  npds({"upload", (dir / "drowsy.eeg").string(), (dir / "alert.eeg").string()});
  std::ofstream(dir / "questions.json") << R"([
    {"question_id": "drowsiness", "inputs": ["RAW"], "output_schema_id": "drowsiness",
     "params": {"channel": "O2"}},
    {"question_id": "drowsy_places", "inputs": ["drowsiness"], "output_schema_id": "drowsy_places",
     "params": {"k": "5"}}
  ])";
  npds({"questions", "install", (dir / "questions.json").string()});
  const auto run = Json::parse(npds({"run"}));
  v.check(run["count"] == 3, "sweep ran " + run["count"].dump() + " jobs");
  const auto page = Json::parse(npds({"answers", "drowsy_places"}));
  const auto& clusters = page["answers"][0]["payload"]["clusters"];
  v.check(clusters.size() == 2, "cluster count " + std::to_string(clusters.size()));
  if (clusters.size() == 2) {
    auto at = [](const Json& c, double lat, double lon) {
      return std::abs(c["lat"].get<double>() - lat) < 1e-9 &&
             std::abs(c["lon"].get<double>() - lon) < 1e-9;
    };
    v.check(at(clusters[0], 51.507, -0.128), "first cluster " + clusters[0].dump());
    v.check(at(clusters[1], 48.857, 2.352), "second cluster " + clusters[1].dump());
    v.check(clusters[0]["mean_ratio"].get<double>() > clusters[1]["mean_ratio"].get<double>(),
            "ranking by mean ratio");
    v.detail << "ranking [(" << clusters[0]["lat"] << ", " << clusters[0]["lon"]
             << ") ratio " << clusters[0]["mean_ratio"] << ", (" << clusters[1]["lat"] << ", "
             << clusters[1]["lon"] << ") ratio " << clusters[1]["mean_ratio"] << "]";
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace npds::acceptance

int main() {
  using namespace npds::acceptance;
  const std::vector<Criterion> criteria{
      {"parseval-band-power", 1.0, parseval_band_power},
      {"ar-recovery", 5.0, ar_recovery},
      {"identification", 30.0, identification},
      {"ica-unmixing", 5.0, ica_unmixing},
      {"privacy-boundary", 60.0, privacy_boundary},
      {"revocation-deletion", 10.0, revocation_and_deletion},
      {"aggregation", 10.0, aggregation},
      {"end-to-end", 15.0, end_to_end},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream timing;
    timing << std::fixed << std::setprecision(2) << seconds << "s/" << c.limit_seconds << "s";
    v.check(seconds < c.limit_seconds, "over time limit");
    failures += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << std::left << std::setw(22) << c.name << " "
              << std::setw(12) << timing.str() << " " << v.detail.str()
              << (v.pass ? "" : " [" + v.failures + "]") << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed"
                              : std::to_string(failures) + " acceptance criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
