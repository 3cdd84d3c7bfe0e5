// Copyright 2026 The clinicl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clinicl {

enum class ErrorCode {
  // data_ingest
  kFileNotFound,
  kMalformedCsv,
  kMissingColumn,
  kAllRowsDropped,
  kNonBinarizableTarget,
  kInvalidValue,
  kDegenerateClass,
  // baselines
  kDimensionMismatch,
  kNonConvergence,
  // explain
  kZeroVector,
  kTooFewFeatures,
  kUnknownFeature,
  // prompt_engine
  kInsufficientExamples,
  kMissingFeatureValue,
  kBudgetUnsatisfiable,
  kEmptyAxis,
  // llm_gateway
  kExhaustedRetries,
  kNonRetryable,
  kMalformedResponse,
  kUnparseableProfile,
  // parser
  kParseFailure,
  kAmbiguousJson,
  // eval_metrics
  kLengthMismatch,
  kUndefinedMetric,
  kGroupCountInvalid,
  kTooManyUndefinedReplicates,
  kDegenerateVector,
  kDegenerateGroup,
  kZeroVariance,
  // shared
  kInvalidArgument,
  kConfigError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported with this exception. `detail` carries a
// code-specific integer: the 1-based line for kMalformedCsv, the last HTTP
// status for gateway errors, and -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::int64_t detail = -1);

  ErrorCode code() const noexcept { return code_; }
  std::int64_t detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::int64_t detail_;
};

}  // namespace clinicl
