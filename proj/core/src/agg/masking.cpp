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

#include "npds/agg/masking.hpp"

#include <sodium.h>

#include <algorithm>
#include <stdexcept>

#include "npds/error.hpp"

namespace npds::agg {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error(Errc::kInternal, "libsodium failed to initialize");
}

void absorb_u32(crypto_generichash_state& st, std::uint32_t v) {
  std::uint8_t b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<std::uint8_t>(v >> (8 * k));
  crypto_generichash_update(&st, b, sizeof b);
}

void absorb_string(crypto_generichash_state& st, std::string_view s) {
  absorb_u32(st, static_cast<std::uint32_t>(s.size()));
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(s.data()), s.size());
}

constexpr std::string_view kMaskDomain = "npds/pairwise-mask/v1";
constexpr std::string_view kCommitDomain = "npds/participants/v1";

}  // namespace

PairSeed random_pair_seed() {
  ensure_sodium();
  PairSeed seed;
  randombytes_buf(seed.data(), seed.size());
  return seed;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

PairSeed pair_seed_from_hex(std::string_view hex) {
  PairSeed seed{};
  if (hex.size() != seed.size() * 2) {
    throw Error(Errc::kInvalidArgument, "pair seed must be 64 hex digits");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < seed.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::kInvalidArgument, "pair seed is not hex");
    seed[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return seed;
}

std::uint64_t derive_pairwise_mask(const PairSeed& seed, std::string_view session_id,
                                   std::uint32_t i, std::uint32_t j) {
  if (i == j) throw Error(Errc::kInvalidArgument, "pairwise mask needs two distinct parties");
  ensure_sodium();
  crypto_generichash_state st;
  crypto_generichash_init(&st, seed.data(), seed.size(), 16);
  absorb_string(st, kMaskDomain);
  absorb_string(st, session_id);
  absorb_u32(st, std::min(i, j));
  absorb_u32(st, std::max(i, j));
  std::uint8_t out[16];
  crypto_generichash_final(&st, out, sizeof out);
  std::uint64_t mask = 0;
  for (int k = 0; k < 8; ++k) mask |= static_cast<std::uint64_t>(out[k]) << (8 * k);
  return mask;
}

std::uint64_t apply_pairwise_masks(std::uint64_t encoded, std::string_view session_id,
                                   std::uint32_t self, std::uint32_t n,
                                   const std::map<std::uint32_t, PairSeed>& seeds) {
  if (self >= n) throw Error(Errc::kInvalidArgument, "participant index out of range");
  std::uint64_t value = encoded;
  for (std::uint32_t j = 0; j < n; ++j) {
    if (j == self) continue;
    auto it = seeds.find(j);
    if (it == seeds.end()) {
      throw Error(Errc::kInvalidArgument, "no pair seed for peer " + std::to_string(j));
    }
    const std::uint64_t mask = derive_pairwise_mask(it->second, session_id, self, j);
    // Unsigned arithmetic wraps mod 2^64.
    value = self < j ? value + mask : value - mask;
  }
  return value;
}

std::string participants_hash(std::string_view session_id,
                              std::vector<std::string> participants) {
  ensure_sodium();
  std::sort(participants.begin(), participants.end());
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 32);
  absorb_string(st, kCommitDomain);
  absorb_string(st, session_id);
  absorb_u32(st, static_cast<std::uint32_t>(participants.size()));
  for (const auto& p : participants) absorb_string(st, p);
  std::uint8_t out[32];
  crypto_generichash_final(&st, out, sizeof out);
  return to_hex(out);
}

}  // namespace npds::agg
