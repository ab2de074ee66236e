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

#ifndef NPDS_ERROR_HPP_
#define NPDS_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace npds {

// Error codes surface verbatim in API responses ({"error": "<name>"}), so
// renaming an enumerator is a wire-format change.
enum class Errc {
  // eeg-data
  kBadMagic,
  kTruncatedFile,
  kInvalidHeader,
  kMetadataDecodeError,
  kUnstableArModel,
  kBadSpec,
  // dsp
  kSignalTooShort,
  kBandOutOfRange,
  kMissingChannel,
  kDegeneratePower,
  kSingularAutocovariance,
  kKindMismatch,
  kEmptyModel,
  kNotConverged,
  kRankDeficient,
  // question engine
  kDependencyCycle,
  kUnknownSchema,
  kUnknownDependency,
  kInvalidQuestion,
  kNoLocatedAnswers,
  kUnknownQuestion,
  kPayloadRejected,
  // api
  kUnauthorized,
  kScopeDenied,
  kBadRecording,
  kUnknownGrant,
  kAlreadyDecided,
  kInvalidScope,
  kUnknownRecording,
  kInvalidRequest,
  kNotFound,
  // aggregation
  kRangeExceeded,
  kNoSuchAnswer,
  kNotAuthorized,
  kSessionMismatch,
  kUnknownSession,
  kMinimumGroupSize,
  kMissingShare,
  kDuplicateShare,
  // generic
  kInvalidArgument,
  kInternal,
};

std::string_view errc_name(Errc code);
std::optional<Errc> errc_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace npds

#endif  // NPDS_ERROR_HPP_
