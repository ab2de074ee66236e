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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "npds/agg/fixed_point.hpp"
#include "npds/api/http_server.hpp"
#include "npds/api/service.hpp"
#include "npds/eeg/format.hpp"
#include "support/oracles.hpp"

namespace npds::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const std::string kOwner = "cli test owner credential";

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome npds(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  CliTest()
      : dir_(fs::temp_directory_path() / ("npds-cli-" + std::to_string(std::random_device{}()))),
        service_(config()),
        server_(service_) {
    fs::create_directories(dir_);
    std::ofstream(dir_ / "owner.cred") << kOwner << "\n";
    server_.bind("127.0.0.1", 0);
    server_.start();
  }
  ~CliTest() override {
    server_.stop();
    fs::remove_all(dir_);
  }

  static api::PdsConfig config() {
    api::PdsConfig c;
    c.owner_credential = kOwner;
    return c;
  }

  std::string server() const { return "http://127.0.0.1:" + std::to_string(server_.port()); }

  // Global flags for an owner invocation, followed by `args`.
  std::vector<std::string> as_owner(std::vector<std::string> args) const {
    std::vector<std::string> v{"--server", server(), "--owner-cred", (dir_ / "owner.cred").string(),
                               "--format", "json"};
    v.insert(v.end(), args.begin(), args.end());
    return v;
  }
  std::vector<std::string> as_token(const std::string& token, std::vector<std::string> args) const {
    std::vector<std::string> v{"--server", server(), "--token", token, "--format", "json"};
    v.insert(v.end(), args.begin(), args.end());
    return v;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  fs::path generate(const std::string& id, std::uint64_t seed = 1) {
    const auto spec = write(id + ".spec",
                            "sample_rate_hz\t128\nduration_s\t20\nid\t" + id +
                                "\nchannels\tF3,F4\nF3.sin\t10 10 0\nF3.noise\t1\n"
                                "F4.sin\t14 10 0\nF4.noise\t1\nmeta.user\talice\n");
    const auto out = dir_ / (id + ".eeg");
    const auto r = npds({"generate", "--spec", spec.string(), "--seed", std::to_string(seed),
                         "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  fs::path dir_;
  api::PdsService service_;
  api::HttpServer server_;
};

TEST_F(CliTest, GenerateIsDeterministic) {
  const auto a = generate("rec", 7);
  const auto first = read_bytes(a);
  generate("rec", 7);
  EXPECT_EQ(read_bytes(a), first);
  const auto b = generate("rec", 8);
  EXPECT_NE(read_bytes(b), first);
}

TEST_F(CliTest, GeneratedSinusoidHasExpectedVariance) {
  const auto spec = write("sine.spec",
                          "sample_rate_hz\t128\nduration_s\t60\nid\tsine\nchannels\tO2\n"
                          "O2.sin\t20 10 0.3\n");
  const auto out = dir_ / "sine.eeg";
  ASSERT_EQ(npds({"generate", "--spec", spec.string(), "--out", out.string()}).code, 0);
  const auto rec = eeg::parse_recording(read_bytes(out));
  EXPECT_EQ(rec.recording_id(), "sine");
  const auto x = rec.channel_as_double(0);
  EXPECT_NEAR(npds::testing::variance(x), 200.0, 2.0);
}

TEST_F(CliTest, BadSpecs) {
  for (const auto* text : {"sample_rate_hz\t128\nduration_s\t1\nchannels\tA\nA.ar\t1 1.2 -0.1\n",
                           "duration_s\t1\n", "sample_rate_hz\tfast\n"}) {
    const auto spec = write("bad.spec", text);
    const auto r =
        npds({"generate", "--spec", spec.string(), "--out", (dir_ / "x.eeg").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("BadSpec"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir_ / "x.eeg"));
  }
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(npds({}).code, 2);
  EXPECT_EQ(npds({"frobnicate"}).code, 2);
  EXPECT_EQ(npds({"generate", "--seed", "1"}).code, 2);
  EXPECT_EQ(npds({"--format", "xml", "run"}).code, 2);
  const auto both = npds({"--token", "abc", "--owner-cred", (dir_ / "owner.cred").string(), "run"});
  EXPECT_EQ(both.code, 2);
  EXPECT_EQ(npds({"--help"}).code, 0);
  EXPECT_EQ(npds(as_owner({"demo-aggregate"})).code, 2);
}

TEST_F(CliTest, UploadRunAnswers) {
  const auto q = write("q.json", R"([
    {"question_id": "alpha", "inputs": ["RAW"], "output_schema_id": "band_power",
     "params": {"band": "alpha", "channel": "F3"}},
    {"question_id": "asym", "inputs": ["RAW"], "output_schema_id": "alpha_asymmetry"}
  ])");
  auto r = npds(as_owner({"questions", "install", q.string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["installed"].size(), 2u);

  const auto f1 = generate("one", 1);
  const auto f2 = generate("two", 2);
  r = npds(as_owner({"upload", f1.string(), f2.string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["recording_ids"], Json({"one", "two"}));

  r = npds(as_owner({"run"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["count"], 4);
  r = npds(as_owner({"run"}));
  EXPECT_EQ(Json::parse(r.out)["count"], 0);

  r = npds(as_owner({"grants", "request", "--client", "app", "--scope", "q:alpha"}));
  ASSERT_EQ(r.code, 0) << r.err;
  r = npds(as_owner({"grants", "approve", "grant-1"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto token = Json::parse(r.out)["access_token"].get<std::string>();

  r = npds(as_token(token, {"answers", "alpha"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto page = Json::parse(r.out);
  ASSERT_EQ(page["answers"].size(), 2u);
  EXPECT_NEAR(page["answers"][0]["payload"]["power_uv2"].get<double>(), 50.0, 5.0);

  r = npds(as_token(token, {"answers", "alpha", "--subject", "two"}));
  EXPECT_EQ(Json::parse(r.out)["answers"].size(), 1u);

  r = npds(as_token(token, {"answers", "asym"}));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("ScopeDenied"), std::string::npos);

  ASSERT_EQ(npds(as_owner({"grants", "revoke", "grant-1"})).code, 0);
  r = npds(as_token(token, {"answers", "alpha"}));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("Unauthorized"), std::string::npos) << r.err;

  r = npds(as_owner({"audit", "--since", "0"}));
  ASSERT_EQ(r.code, 0);
  EXPECT_GT(Json::parse(r.out)["entries"].size(), 8u);
}

TEST_F(CliTest, TableOutput) {
  const auto f = generate("tab");
  std::vector<std::string> args{"--server", server(), "--owner-cred",
                                (dir_ / "owner.cred").string(), "upload", f.string()};
  auto r = npds(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "tab\n");
  args = {"--server", server(), "--owner-cred", (dir_ / "owner.cred").string(), "audit"};
  r = npds(args);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("SEQ", 0), 0u);
}

TEST_F(CliTest, ExportAndDelete) {
  const auto f1 = generate("one", 1);
  const auto f2 = generate("two", 2);
  ASSERT_EQ(npds(as_owner({"upload", f1.string(), f2.string()})).code, 0);
  const auto out = dir_ / "export.bin";
  ASSERT_EQ(npds(as_owner({"export", "--out", out.string()})).code, 0);
  auto expected = read_bytes(f1);
  const auto second = read_bytes(f2);
  expected.insert(expected.end(), second.begin(), second.end());
  EXPECT_EQ(read_bytes(out), expected);

  auto r = npds(as_owner({"delete", "one"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["deleted"], 1);
  r = npds(as_owner({"delete", "one"}));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnknownRecording"), std::string::npos);
  r = npds(as_owner({"delete", "--all"}));
  EXPECT_EQ(Json::parse(r.out)["deleted"], 1);
  r = npds(as_owner({"delete", "--all"}));
  EXPECT_EQ(Json::parse(r.out)["deleted"], 0);
  EXPECT_EQ(npds(as_owner({"delete"})).code, 2);
}

TEST_F(CliTest, UnreachableServer) {
  const auto r = npds({"--server", "http://127.0.0.1:1", "--token", "x", "questions", "list"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Internal"), std::string::npos);
}

TEST(DemoAggregate, SmallGroup) {
  const auto report = demo_aggregate({2.0, 3.0, 5.0});
  EXPECT_EQ(report.sum, 10.0);
  EXPECT_NEAR(report.mean, 10.0 / 3.0, std::ldexp(1.0, -20));
  EXPECT_EQ(report.participants.size(), 3u);
  EXPECT_TRUE(report.verified);
}

TEST(DemoAggregate, TooSmall) {
  try {
    demo_aggregate({1.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMinimumGroupSize);
  }
  std::ostringstream out, err;
  EXPECT_EQ(run({"demo-aggregate", "--nodes", "2"}, out, err), 1);
  EXPECT_NE(err.str().find("MinimumGroupSize"), std::string::npos);
}

TEST(DemoAggregate, RandomNodesMatchPlaintext) {
  std::ostringstream out, err;
  ASSERT_EQ(run({"--format", "json", "demo-aggregate", "--nodes", "10", "--seed", "4"}, out, err),
            0)
      << err.str();
  const auto j = Json::parse(out.str());
  EXPECT_EQ(j["participants"].size(), 10u);
  std::int64_t plain = 0;
  for (const auto& v : j["values"]) {
    plain += std::llround(v.get<double>() * static_cast<double>(agg::kFixedPointScale));
  }
  EXPECT_EQ(j["sum"].get<double>(), static_cast<double>(plain) / agg::kFixedPointScale);
  EXPECT_TRUE(j["verified"].get<bool>());
}

TEST(DemoAggregate, ValuesFromFile) {
  const auto p = fs::temp_directory_path() / ("npds-values-" + std::to_string(std::random_device{}()));
  std::ofstream(p) << "2\n3\n5\n";
  std::ostringstream out, err;
  EXPECT_EQ(run({"demo-aggregate", "--answers", p.string()}, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("sum 10"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("verified yes"), std::string::npos);
  fs::remove(p);
}

}  // namespace
}  // namespace npds::cli
