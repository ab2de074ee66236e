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

#include "npds/error.hpp"

#include <array>
#include <utility>

namespace npds {
namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 41> kNames{{
    {Errc::kBadMagic, "BadMagic"},
    {Errc::kTruncatedFile, "TruncatedFile"},
    {Errc::kInvalidHeader, "InvalidHeader"},
    {Errc::kMetadataDecodeError, "MetadataDecodeError"},
    {Errc::kUnstableArModel, "UnstableArModel"},
    {Errc::kBadSpec, "BadSpec"},
    {Errc::kSignalTooShort, "SignalTooShort"},
    {Errc::kBandOutOfRange, "BandOutOfRange"},
    {Errc::kMissingChannel, "MissingChannel"},
    {Errc::kDegeneratePower, "DegeneratePower"},
    {Errc::kSingularAutocovariance, "SingularAutocovariance"},
    {Errc::kKindMismatch, "KindMismatch"},
    {Errc::kEmptyModel, "EmptyModel"},
    {Errc::kNotConverged, "NotConverged"},
    {Errc::kRankDeficient, "RankDeficient"},
    {Errc::kDependencyCycle, "DependencyCycle"},
    {Errc::kUnknownSchema, "UnknownSchema"},
    {Errc::kUnknownDependency, "UnknownDependency"},
    {Errc::kInvalidQuestion, "InvalidQuestion"},
    {Errc::kNoLocatedAnswers, "NoLocatedAnswers"},
    {Errc::kUnknownQuestion, "UnknownQuestion"},
    {Errc::kPayloadRejected, "PayloadRejected"},
    {Errc::kUnauthorized, "Unauthorized"},
    {Errc::kScopeDenied, "ScopeDenied"},
    {Errc::kBadRecording, "BadRecording"},
    {Errc::kUnknownGrant, "UnknownGrant"},
    {Errc::kAlreadyDecided, "AlreadyDecided"},
    {Errc::kInvalidScope, "InvalidScope"},
    {Errc::kUnknownRecording, "UnknownRecording"},
    {Errc::kInvalidRequest, "InvalidRequest"},
    {Errc::kNotFound, "NotFound"},
    {Errc::kRangeExceeded, "RangeExceeded"},
    {Errc::kNoSuchAnswer, "NoSuchAnswer"},
    {Errc::kNotAuthorized, "NotAuthorized"},
    {Errc::kSessionMismatch, "SessionMismatch"},
    {Errc::kUnknownSession, "UnknownSession"},
    {Errc::kMinimumGroupSize, "MinimumGroupSize"},
    {Errc::kMissingShare, "MissingShare"},
    {Errc::kDuplicateShare, "DuplicateShare"},
    {Errc::kInvalidArgument, "InvalidArgument"},
    {Errc::kInternal, "Internal"},
}};

}  // namespace

std::string_view errc_name(Errc code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Internal";
}

std::optional<Errc> errc_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

}  // namespace npds
