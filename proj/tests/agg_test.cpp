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

#include <cmath>
#include <memory>
#include <random>
#include <set>

#include "npds/agg/aggregator.hpp"
#include "npds/agg/fixed_point.hpp"
#include "npds/agg/masking.hpp"
#include "support/fixtures.hpp"

namespace npds::agg {
namespace {

using npds::testing::error_of;

PairSeed seed_from(std::uint64_t v) {
  PairSeed s{};
  std::mt19937_64 rng(v);
  for (auto& b : s) b = static_cast<std::uint8_t>(rng());
  return s;
}

// Seeds for every pair of n participants: seeds[i][j] == seeds[j][i].
std::vector<std::map<std::uint32_t, PairSeed>> pairwise_seeds(std::uint32_t n,
                                                              std::uint64_t base) {
  std::vector<std::map<std::uint32_t, PairSeed>> out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const auto s = seed_from(base * 1000 + i * 37 + j);
      out[i][j] = s;
      out[j][i] = s;
    }
  }
  return out;
}

class LocalParticipant : public ParticipantChannel {
 public:
  LocalParticipant(std::string id, double value, std::uint32_t index, std::uint32_t n,
                   std::map<std::uint32_t, PairSeed> seeds)
      : id_(std::move(id)), value_(value), index_(index), n_(n), seeds_(std::move(seeds)) {}

  std::string participant_id() const override { return id_; }
  void open(const SessionAnnouncement& a) override { opened_ = a; }
  MaskedShare contribute(const std::string& session_id) override {
    if (fail_) throw Error(Errc::kNoSuchAnswer, "no answer");
    return {id_, apply_pairwise_masks(encode_fixed(value_), session_id, index_, n_, seeds_)};
  }

  std::optional<SessionAnnouncement> opened_;
  bool fail_ = false;

 private:
  std::string id_;
  double value_;
  std::uint32_t index_, n_;
  std::map<std::uint32_t, PairSeed> seeds_;
};

struct Group {
  AggregationSession session;
  std::vector<std::unique_ptr<LocalParticipant>> members;
  std::vector<ParticipantChannel*> channels;
};

Group make_group(const std::vector<double>& values, const std::string& session_id,
                 std::uint64_t seed_base = 1) {
  const auto n = static_cast<std::uint32_t>(values.size());
  std::vector<std::string> ids;
  for (std::uint32_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  Group g{make_session(session_id, "q", "x", ids), {}, {}};
  const auto seeds = pairwise_seeds(n, seed_base);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto idx = g.session.index_of(ids[i]);
    g.members.push_back(std::make_unique<LocalParticipant>(ids[i], values[i], idx, n, seeds[idx]));
    g.channels.push_back(g.members.back().get());
  }
  return g;
}

std::vector<MaskedShare> shares_of(Group& g) {
  std::vector<MaskedShare> out;
  for (auto* c : g.channels) out.push_back(c->contribute(g.session.session_id));
  return out;
}

TEST(FixedPoint, Encoding) {
  EXPECT_EQ(encode_fixed(0.0), 0u);
  EXPECT_EQ(decode_fixed(0, 3), 0.0);
  EXPECT_EQ(encode_fixed(1.5), 1572864u);
  EXPECT_EQ(encode_fixed(-1.0), ~std::uint64_t{0} - kFixedPointScale + 1);
  EXPECT_EQ(decode_fixed(encode_fixed(-2.0) + encode_fixed(2.0), 2), 0.0);
  EXPECT_EQ(decode_fixed(encode_fixed(-7.25), 1), -7.25);
  EXPECT_EQ(decode_fixed(encode_fixed(kMaxEncodableMagnitude), 1), kMaxEncodableMagnitude);
  EXPECT_EQ(error_of([] { encode_fixed(kMaxEncodableMagnitude * 1.01); }), Errc::kRangeExceeded);
  EXPECT_EQ(error_of([] { encode_fixed(std::nan("")); }), Errc::kRangeExceeded);
  EXPECT_EQ(error_of([] { encode_fixed(INFINITY); }), Errc::kRangeExceeded);
  EXPECT_EQ(error_of([] { decode_fixed(0, 0); }), Errc::kInvalidArgument);
}

TEST(FixedPoint, RoundTripWithinHalfQuantum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    EXPECT_LE(std::abs(decode_fixed(encode_fixed(x), 1) - x), 0.5 / kFixedPointScale);
  }
}

TEST(Masks, DeterministicAndSymmetric) {
  const auto seed = seed_from(1);
  EXPECT_EQ(derive_pairwise_mask(seed, "s", 1, 2), derive_pairwise_mask(seed, "s", 1, 2));
  EXPECT_EQ(derive_pairwise_mask(seed, "s", 1, 2), derive_pairwise_mask(seed, "s", 2, 1));
  EXPECT_NE(derive_pairwise_mask(seed, "s", 1, 2), derive_pairwise_mask(seed, "s", 1, 3));
  EXPECT_NE(derive_pairwise_mask(seed, "s", 1, 2), derive_pairwise_mask(seed_from(2), "s", 1, 2));
  EXPECT_EQ(error_of([&] { derive_pairwise_mask(seed, "s", 4, 4); }), Errc::kInvalidArgument);
}

TEST(Masks, NoCollisionsAcrossSessions) {
  const auto seed = seed_from(9);
  std::set<std::uint64_t> seen;
  for (int s = 0; s < 10000; ++s) {
    seen.insert(derive_pairwise_mask(seed, "session-" + std::to_string(s), 0, 1));
  }
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(Masks, TelescopeToZero) {
  for (std::uint32_t n = 2; n <= 9; ++n) {
    const auto seeds = pairwise_seeds(n, n);
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < n; ++i) total += apply_pairwise_masks(0, "t", i, n, seeds[i]);
    EXPECT_EQ(total, 0u) << n;
  }
}

TEST(Masks, ShareChangesWithAnySeedAndSession) {
  auto seeds = pairwise_seeds(4, 5);
  const auto enc = encode_fixed(42.0);
  const auto base = apply_pairwise_masks(enc, "s1", 1, 4, seeds[1]);
  EXPECT_NE(base, enc);
  EXPECT_NE(apply_pairwise_masks(enc, "s2", 1, 4, seeds[1]), base);
  for (std::uint32_t peer : {0u, 2u, 3u}) {
    auto changed = seeds[1];
    changed[peer][0] ^= 1;
    EXPECT_NE(apply_pairwise_masks(enc, "s1", 1, 4, changed), base) << peer;
  }
}

TEST(Masks, SharesLookUniform) {
  // Bit balance of one participant's share of a fixed plaintext over many
  // sessions.
  const auto seeds = pairwise_seeds(3, 2);
  std::array<int, 64> ones{};
  constexpr int kSessions = 4000;
  for (int s = 0; s < kSessions; ++s) {
    const auto v = apply_pairwise_masks(encode_fixed(1.0), "u" + std::to_string(s), 0, 3, seeds[0]);
    for (int b = 0; b < 64; ++b) ones[b] += (v >> b) & 1;
  }
  // Binomial(4000, 0.5) has sigma ~ 31.6; allow five sigma.
  for (int b = 0; b < 64; ++b) EXPECT_NEAR(ones[b], kSessions / 2, 160) << "bit " << b;
}

TEST(Masks, HexAndCommitments) {
  const auto seed = seed_from(4);
  EXPECT_EQ(pair_seed_from_hex(to_hex(seed)), seed);
  EXPECT_EQ(to_hex(seed).size(), 64u);
  EXPECT_EQ(error_of([] { pair_seed_from_hex("abcd"); }), Errc::kInvalidArgument);
  EXPECT_EQ(error_of([] { pair_seed_from_hex(std::string(64, 'g')); }), Errc::kInvalidArgument);
  EXPECT_NE(random_pair_seed(), random_pair_seed());
  EXPECT_EQ(participants_hash("s", {"b", "a", "c"}), participants_hash("s", {"c", "b", "a"}));
  EXPECT_NE(participants_hash("s", {"a", "b", "c"}), participants_hash("t", {"a", "b", "c"}));
  EXPECT_NE(participants_hash("s", {"a", "b", "c"}), participants_hash("s", {"a", "b", "d"}));
  EXPECT_NE(participants_hash("s", {"ab", "c", "d"}), participants_hash("s", {"a", "bc", "d"}));
}

TEST(Session, Canonicalization) {
  const auto s = make_session("s", "q", "ratio", {"c", "a", "b"});
  EXPECT_EQ(s.participants, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(s.index_of("c"), 2u);
  EXPECT_EQ(s.state, SessionState::kCreated);
  const auto a = s.announcement();
  EXPECT_EQ(a.participants_hash, participants_hash("s", {"a", "b", "c"}));
  EXPECT_EQ(a.scale, kFixedPointScale);
  EXPECT_EQ(a.field, "ratio");
  EXPECT_EQ(error_of([&] { s.index_of("z"); }), Errc::kInvalidArgument);
  EXPECT_EQ(error_of([] { make_session("s", "q", "f", {"a", "b"}); }), Errc::kMinimumGroupSize);
  EXPECT_EQ(error_of([] { make_session("s", "q", "f", {"a", "a", "b"}); }),
            Errc::kInvalidArgument);
}

TEST(Aggregate, SmallExample) {
  auto g = make_group({2.0, 3.0, 5.0}, "ex");
  const auto shares = shares_of(g);
  EXPECT_EQ(decode_fixed(sum_shares(shares), 3), 10.0);
  const auto r = aggregate(g.session, shares);
  EXPECT_EQ(r.sum, 10.0);
  EXPECT_EQ(r.n, 3u);
  EXPECT_NEAR(r.mean, 10.0 / 3.0, std::ldexp(1.0, -20));
  for (const auto& s : shares) {
    EXPECT_NE(s.value, encode_fixed(2.0));
    EXPECT_NE(s.value, encode_fixed(3.0));
    EXPECT_NE(s.value, encode_fixed(5.0));
  }
}

TEST(Aggregate, ExactOverRandomTrials) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> values(5);
    std::int64_t plain = 0;
    double real_sum = 0.0;
    for (auto& v : values) {
      v = u(rng);
      plain += static_cast<std::int64_t>(std::llround(v * kFixedPointScale));
      real_sum += v;
    }
    auto g = make_group(values, "trial-" + std::to_string(trial), trial + 1);
    const auto r = run_session(g.session, g.channels);
    EXPECT_EQ(r.sum, static_cast<double>(plain) / kFixedPointScale);
    EXPECT_LE(std::abs(r.sum - real_sum), 5 * 0.5 / kFixedPointScale);
    EXPECT_EQ(g.session.state, SessionState::kDone);
  }
}

TEST(Aggregate, WithheldShareGivesGarbage) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values{u(rng), u(rng), u(rng), u(rng)};
    auto g = make_group(values, "drop-" + std::to_string(trial), trial + 3);
    auto shares = shares_of(g);
    const double truth = aggregate(g.session, shares).sum;
    shares.erase(shares.begin() + trial % 4);
    EXPECT_NE(decode_fixed(sum_shares(shares), 3), truth);
    EXPECT_EQ(error_of([&] { aggregate(g.session, shares); }), Errc::kMissingShare);
  }
}

TEST(Aggregate, CompletenessChecks) {
  auto g = make_group({1.0, 2.0, 3.0}, "c");
  auto shares = shares_of(g);
  auto dup = shares;
  dup.push_back(shares[0]);
  EXPECT_EQ(error_of([&] { aggregate(g.session, dup); }), Errc::kDuplicateShare);
  auto stranger = shares;
  stranger[2].participant_id = "zz";
  EXPECT_NE(error_of([&] { aggregate(g.session, stranger); }), Errc::kInternal);
  auto tiny = g.session;
  tiny.participants.pop_back();
  EXPECT_EQ(error_of([&] { aggregate(tiny, std::span(shares).first(2)); }),
            Errc::kMinimumGroupSize);
}

TEST(RunSession, AnnouncesAndFailsOnParticipantError) {
  auto g = make_group({1.0, 2.0, 3.0, 4.0}, "run");
  g.members[2]->fail_ = true;
  EXPECT_EQ(error_of([&] { run_session(g.session, g.channels); }), Errc::kNoSuchAnswer);
  EXPECT_EQ(g.session.state, SessionState::kFailed);
  for (const auto& m : g.members) {
    ASSERT_TRUE(m->opened_.has_value());
    EXPECT_EQ(m->opened_->participants_hash, g.session.announcement().participants_hash);
  }
}

TEST(RunSession, Idempotent) {
  auto g = make_group({1.0, 2.0, 3.0}, "same");
  EXPECT_EQ(shares_of(g), shares_of(g));
}

}  // namespace
}  // namespace npds::agg
