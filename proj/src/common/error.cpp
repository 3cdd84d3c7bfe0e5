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

#include "clinicl/common/error.hpp"

namespace clinicl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kAllRowsDropped: return "AllRowsDropped";
    case ErrorCode::kNonBinarizableTarget: return "NonBinarizableTarget";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kTooFewFeatures: return "TooFewFeatures";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kInsufficientExamples: return "InsufficientExamples";
    case ErrorCode::kMissingFeatureValue: return "MissingFeatureValue";
    case ErrorCode::kBudgetUnsatisfiable: return "BudgetUnsatisfiable";
    case ErrorCode::kEmptyAxis: return "EmptyAxis";
    case ErrorCode::kExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::kNonRetryable: return "NonRetryable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kUnparseableProfile: return "UnparseableProfile";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kAmbiguousJson: return "AmbiguousJson";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUndefinedMetric: return "UndefinedMetric";
    case ErrorCode::kGroupCountInvalid: return "GroupCountInvalid";
    case ErrorCode::kTooManyUndefinedReplicates: return "TooManyUndefinedReplicates";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kDegenerateGroup: return "DegenerateGroup";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::int64_t detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(detail) {}

}  // namespace clinicl
