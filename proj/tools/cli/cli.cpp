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

#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>

#include "npds/agg/aggregator.hpp"
#include "npds/agg/masking.hpp"
#include "npds/api/http_client.hpp"
#include "npds/api/http_server.hpp"
#include "npds/api/service.hpp"
#include "npds/eeg/format.hpp"
#include "npds/eeg/synthetic.hpp"
#include "npds/error.hpp"
#include "npds/scopes.hpp"

namespace npds::cli {
namespace {

using Json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kInvalidArgument, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::string& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kInvalidArgument, "cannot write " + path);
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(s.find_last_not_of(ws) + 1);
  s.erase(0, s.find_first_not_of(ws));
  return s;
}

// Left-aligned columns separated by two spaces.
void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      text += cells[c];
      if (c + 1 < cells.size()) text += std::string(width[c] - cells[c].size() + 2, ' ');
    }
    out << text << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string s;
  for (const auto& item : items) s += (s.empty() ? "" : sep) + item;
  return s;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidArgument, "not a number: '" + token + "'");
    }
  }
  return values;
}

struct Options {
  std::string server = "http://127.0.0.1:8470";
  std::string token;
  std::string owner_cred;
  std::string format = "table";

  bool json() const { return format == "json"; }

  api::PdsClient client() const {
    if (!token.empty() && !owner_cred.empty()) {
      throw UsageError("--token and --owner-cred are mutually exclusive");
    }
    std::string credential = token;
    if (!owner_cred.empty()) credential = trim(read_text(owner_cred));
    return api::PdsClient(server, credential);
  }
};

void print_grants(std::ostream& out, const Options& opt, const std::vector<api::Grant>& grants) {
  if (opt.json()) {
    Json list = Json::array();
    for (const auto& g : grants) list.push_back(api::to_json(g));
    out << Json{{"grants", list}}.dump(2) << '\n';
    return;
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& g : grants) {
    rows.push_back({g.grant_id, g.client_id, std::string(api::grant_state_name(g.state)),
                    join({g.scopes.begin(), g.scopes.end()}, ",")});
  }
  print_table(out, {"GRANT", "CLIENT", "STATE", "SCOPES"}, rows);
}

}  // namespace

DemoAggregateReport demo_aggregate(const std::vector<double>& values) {
  if (values.size() < agg::kMinGroupSize) {
    throw Error(Errc::kMinimumGroupSize,
                "aggregation needs at least " + std::to_string(agg::kMinGroupSize) +
                    " participants, got " + std::to_string(values.size()));
  }
  constexpr std::string_view kQuestionId = "alpha_asymmetry";
  constexpr std::string_view kField = "asymmetry";
  const auto n = values.size();

  struct Node {
    std::string id;
    std::string owner_credential;
    std::unique_ptr<api::PdsService> service;
    std::unique_ptr<api::HttpServer> server;
    std::string url;
  };
  std::vector<Node> nodes(n);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = nodes[i];
    node.id = "pds-" + std::to_string(i);
    ids.push_back(node.id);
    const auto secret = agg::random_pair_seed();
    node.owner_credential = agg::to_hex(secret);
    api::PdsConfig config;
    config.owner_credential = node.owner_credential;
    node.service = std::make_unique<api::PdsService>(config);
    node.server = std::make_unique<api::HttpServer>(*node.service);
    node.url = "http://127.0.0.1:" + std::to_string(node.server->bind("127.0.0.1", 0));
    node.server->start();

    qe::Question q;
    q.question_id = kQuestionId;
    q.inputs = {std::string(qe::kRawInput)};
    q.output_schema_id = kQuestionId;
    q.required_scope = "q:" + std::string(kQuestionId);
    auto& engine = node.service->engine();
    engine.install_question(q);
    engine.store_answer(std::string(kQuestionId), qe::Subject{node.id + "-rec", 0, 1'000'000},
                        Json{{"left", "F3"}, {"right", "F4"}, {std::string(kField), values[i]}},
                        node.service->now(), {});
  }

  const auto session_id = agg::to_hex(agg::random_pair_seed()).substr(0, 16);
  std::map<std::pair<std::string, std::string>, agg::PairSeed> pair_seeds;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pair_seeds[{ids[i], ids[j]}] = agg::random_pair_seed();
  }

  std::vector<std::unique_ptr<api::HttpParticipantChannel>> channels;
  for (auto& node : nodes) {
    api::PdsClient owner(node.url, node.owner_credential);
    api::Provisioning p{session_id, node.id, ids, {}};
    for (const auto& peer : ids) {
      if (peer == node.id) continue;
      p.pair_seeds[peer] = pair_seeds.at({std::min(peer, node.id), std::max(peer, node.id)});
    }
    owner.provision(p);

    api::PdsClient anonymous(node.url, "");
    const auto grant =
        anonymous.request_grant("aggregator", {std::string(scopes::kAggregateParticipate)});
    const auto decision = owner.decide_grant(grant.grant_id, true);
    channels.push_back(std::make_unique<api::HttpParticipantChannel>(
        node.id, node.url, decision.at("access_token").get<std::string>()));
  }

  auto session = agg::make_session(session_id, std::string(kQuestionId), std::string(kField), ids);
  std::vector<agg::ParticipantChannel*> raw_channels;
  for (auto& c : channels) raw_channels.push_back(c.get());
  const auto result = agg::run_session(session, raw_channels);

  std::uint64_t encoded_sum = 0;
  for (double v : values) encoded_sum += agg::encode_fixed(v);

  DemoAggregateReport report;
  report.participants = session.participants;
  report.values = values;
  report.sum = result.sum;
  report.mean = result.mean;
  report.plaintext_sum = agg::decode_fixed(encoded_sum, n);
  report.verified = report.sum == report.plaintext_sum;
  for (auto& node : nodes) node.server->stop();
  return report;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Personal data store client for EEG recordings", "npds"};
  app.set_help_all_flag("--help-all", "Expand all help");
  app.require_subcommand(1);
  app.add_option("--server", opt.server, "PDS base URL")->capture_default_str();
  app.add_option("--token", opt.token, "Bearer access token");
  app.add_option("--owner-cred", opt.owner_cred, "File holding the owner credential");
  app.add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  std::string spec_path, out_path;
  std::uint64_t seed = 0;
  auto* generate = app.add_subcommand("generate", "Write a synthetic recording file");
  generate->add_option("--spec", spec_path, "Synthetic spec file")->required();
  generate->add_option("--seed", seed, "Generator seed")->capture_default_str();
  generate->add_option("--out", out_path, "Output file")->required();

  std::vector<std::string> files;
  auto* upload = app.add_subcommand("upload", "Upload recording files");
  upload->add_option("files", files, "Recording files")->required();

  std::string question_id;
  std::optional<std::int64_t> from, to;
  std::vector<std::string> subjects;
  auto* answers = app.add_subcommand("answers", "Fetch answers to a question");
  answers->add_option("question_id", question_id)->required();
  answers->add_option("--from", from, "Window start (microseconds)");
  answers->add_option("--to", to, "Window end (microseconds)");
  answers->add_option("--subject", subjects, "Restrict to subject ids");

  auto* grants = app.add_subcommand("grants", "Request and manage grants");
  grants->require_subcommand(1);
  auto* grants_list = grants->add_subcommand("list", "List grants (owner)");
  std::string client_id;
  std::vector<std::string> scope_list;
  auto* grants_request = grants->add_subcommand("request", "Request a grant");
  grants_request->add_option("--client", client_id, "Client id")->required();
  grants_request->add_option("--scope", scope_list, "Requested scope")->required();
  std::string grant_id;
  auto* grants_approve = grants->add_subcommand("approve", "Approve a pending grant");
  auto* grants_deny = grants->add_subcommand("deny", "Deny a pending grant");
  auto* grants_revoke = grants->add_subcommand("revoke", "Revoke a grant");
  for (auto* sub : {grants_approve, grants_deny, grants_revoke}) {
    sub->add_option("grant_id", grant_id)->required();
  }

  auto* questions = app.add_subcommand("questions", "List or install questions");
  questions->require_subcommand(1);
  auto* questions_list = questions->add_subcommand("list", "List installed questions");
  std::string question_file;
  auto* questions_install =
      questions->add_subcommand("install", "Install questions from a JSON file");
  questions_install->add_option("file", question_file)->required();

  auto* run_cmd = app.add_subcommand("run", "Run due computations now (owner)");

  std::int64_t since = 0;
  auto* audit = app.add_subcommand("audit", "Show the audit log (owner)");
  audit->add_option("--since", since, "Only entries after this sequence number");

  std::string export_path;
  auto* export_cmd = app.add_subcommand("export", "Download all stored recordings");
  export_cmd->add_option("--out", export_path, "Output file")->required();

  std::vector<std::string> delete_ids;
  bool delete_all = false;
  auto* delete_cmd = app.add_subcommand("delete", "Delete recordings and derived answers");
  auto* ids_opt = delete_cmd->add_option("recording_ids", delete_ids);
  auto* all_opt = delete_cmd->add_flag("--all", delete_all, "Delete every recording");
  ids_opt->excludes(all_opt);
  delete_cmd->require_option(1);

  std::optional<std::size_t> node_count;
  std::string answers_file;
  auto* demo = app.add_subcommand("demo-aggregate",
                                  "Masked aggregation across in-process PDS nodes");
  demo->add_option("--nodes", node_count, "Number of nodes");
  demo->add_option("--answers", answers_file, "File with one value per node");
  demo->add_option("--seed", seed, "Seed for random values")->capture_default_str();

  std::vector<const char*> argv{"npds"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      const auto spec = eeg::parse_synthetic_spec(read_text(spec_path));
      const auto rec = eeg::generate_synthetic(spec, seed);
      const auto bytes = eeg::serialize_recording(rec);
      write_file(out_path, bytes);
      if (opt.json()) {
        out << Json{{"recording_id", rec.recording_id()},
                    {"path", out_path},
                    {"bytes", bytes.size()},
                    {"channels", rec.channels().size()},
                    {"samples", rec.sample_count()}}
                   .dump(2)
            << '\n';
      } else {
        out << "wrote " << out_path << " (" << rec.recording_id() << ", " << bytes.size()
            << " bytes)\n";
      }
    } else if (upload->parsed()) {
      auto client = opt.client();
      std::vector<std::string> ids;
      for (const auto& f : files) ids.push_back(client.upload(read_file(f)));
      if (opt.json()) {
        out << Json{{"recording_ids", ids}}.dump(2) << '\n';
      } else {
        for (const auto& id : ids) out << id << '\n';
      }
    } else if (answers->parsed()) {
      qe::AnswerFilter filter;
      filter.from_micros = from;
      filter.to_micros = to;
      if (!subjects.empty()) filter.subject_ids = std::set(subjects.begin(), subjects.end());
      const auto page = opt.client().answers(question_id, filter);
      if (opt.json()) {
        out << page.dump(2) << '\n';
      } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& a : page.at("answers")) {
          rows.push_back({a.at("subject").at("id").get<std::string>(),
                          std::to_string(a.at("subject").at("start").get<std::int64_t>()),
                          std::to_string(a.at("subject").at("end").get<std::int64_t>()),
                          a.at("payload").dump()});
        }
        print_table(out, {"SUBJECT", "START", "END", "PAYLOAD"}, rows);
      }
    } else if (grants->parsed()) {
      auto client = opt.client();
      if (grants_list->parsed()) {
        print_grants(out, opt, client.list_grants());
      } else if (grants_request->parsed()) {
        print_grants(out, opt,
                     {client.request_grant(client_id, {scope_list.begin(), scope_list.end()})});
      } else if (grants_revoke->parsed()) {
        print_grants(out, opt, {client.revoke_grant(grant_id)});
      } else {
        const auto decision = client.decide_grant(grant_id, grants_approve->parsed());
        if (opt.json()) {
          out << decision.dump(2) << '\n';
        } else {
          print_grants(out, opt, {api::grant_from_json(decision.at("grant"))});
          if (decision.contains("access_token")) {
            out << "access_token " << decision["access_token"].get<std::string>() << '\n';
          }
        }
      }
    } else if (questions->parsed()) {
      auto client = opt.client();
      if (questions_list->parsed()) {
        const auto list = client.list_questions();
        if (opt.json()) {
          Json arr = Json::array();
          for (const auto& q : list) arr.push_back(qe::to_json(q));
          out << Json{{"questions", arr}}.dump(2) << '\n';
        } else {
          std::vector<std::vector<std::string>> rows;
          for (const auto& q : list) {
            rows.push_back({q.question_id, std::to_string(q.version), q.output_schema_id,
                            join(q.inputs, ","), q.required_scope});
          }
          print_table(out, {"QUESTION", "VERSION", "SCHEMA", "INPUTS", "SCOPE"}, rows);
        }
      } else {
        Json doc;
        try {
          doc = Json::parse(read_text(question_file));
        } catch (const Json::exception& e) {
          throw Error(Errc::kInvalidQuestion, question_file + ": " + e.what());
        }
        if (!doc.is_array()) doc = Json::array({doc});
        Json results = Json::array();
        for (const auto& q : doc) {
          results.push_back(client.install_question(qe::question_from_json(q)));
        }
        if (opt.json()) {
          out << Json{{"installed", results}}.dump(2) << '\n';
        } else {
          for (const auto& r : results) {
            out << r.at("question").at("question_id").get<std::string>() << " v"
                << r.at("question").at("version").get<int>()
                << (r.at("version_changed").get<bool>() ? "" : " (unchanged)") << ", "
                << r.at("jobs_enqueued").get<std::size_t>() << " jobs enqueued\n";
          }
        }
      }
    } else if (run_cmd->parsed()) {
      const auto result = opt.client().run_compute();
      if (opt.json()) {
        out << result.dump(2) << '\n';
      } else {
        out << result.at("count").get<std::size_t>() << " jobs\n";
        for (const auto& job : result.at("jobs")) {
          out << job.at("question_id").get<std::string>() << " v"
              << job.at("version").get<int>() << " " << job.at("subject_id").get<std::string>()
              << " " << job.at("state").get<std::string>();
          if (job.contains("error") && !job["error"].is_null()) {
            out << " " << job["error"].get<std::string>();
          }
          out << '\n';
        }
      }
    } else if (audit->parsed()) {
      const auto entries = opt.client().audit(since);
      if (opt.json()) {
        Json arr = Json::array();
        for (const auto& e : entries) arr.push_back(api::to_json(e));
        out << Json{{"entries", arr}}.dump(2) << '\n';
      } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : entries) {
          std::vector<std::string> flags;
          for (auto f : e.anomaly_flags) flags.emplace_back(api::anomaly_flag_name(f));
          rows.push_back({std::to_string(e.seq), std::to_string(e.timestamp_micros), e.client_id,
                          e.endpoint, e.scope_used, std::string(api::outcome_name(e.outcome)),
                          e.error.value_or(""), join(flags, ",")});
        }
        print_table(out, {"SEQ", "TIME", "CLIENT", "ENDPOINT", "SCOPE", "OUTCOME", "ERROR", "FLAGS"},
                    rows);
      }
    } else if (export_cmd->parsed()) {
      const auto bytes = opt.client().export_all();
      write_file(export_path, bytes);
      if (opt.json()) {
        out << Json{{"path", export_path}, {"bytes", bytes.size()}}.dump(2) << '\n';
      } else {
        out << "wrote " << export_path << " (" << bytes.size() << " bytes)\n";
      }
    } else if (delete_cmd->parsed()) {
      auto client = opt.client();
      const auto n = delete_all ? client.delete_all() : client.delete_recordings(delete_ids);
      if (opt.json()) {
        out << Json{{"deleted", n}}.dump(2) << '\n';
      } else {
        out << "deleted " << n << " recordings\n";
      }
    } else if (demo->parsed()) {
      std::vector<double> values;
      if (!answers_file.empty()) {
        values = parse_values(read_text(answers_file));
        if (node_count && *node_count != values.size()) {
          throw UsageError("--nodes does not match the number of values in " + answers_file);
        }
      } else {
        if (!node_count) throw UsageError("give --nodes or --answers");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-100.0, 100.0);
        for (std::size_t i = 0; i < *node_count; ++i) values.push_back(dist(rng));
      }
      const auto report = demo_aggregate(values);
      if (opt.json()) {
        out << Json{{"participants", report.participants},
                    {"values", report.values},
                    {"sum", report.sum},
                    {"mean", report.mean},
                    {"plaintext_sum", report.plaintext_sum},
                    {"verified", report.verified}}
                   .dump(2)
            << '\n';
      } else {
        out << "participants " << report.participants.size() << '\n'
            << "sum " << format_double(report.sum) << '\n'
            << "mean " << format_double(report.mean) << '\n'
            << "plaintext_sum " << format_double(report.plaintext_sum) << '\n'
            << "verified " << (report.verified ? "yes" : "NO") << '\n';
      }
      if (!report.verified) return 1;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.code_name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << errc_name(Errc::kInternal) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace npds::cli
