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

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "clinicl/gateway/gateway.hpp"

namespace clinicl {

// Deterministic offline model: label = 1 iff sum_f w_f * x_f + bias > 0 over
// the target profile's values. Categorical values contribute their raw code.
struct MockSpec {
  std::vector<FeatureSpec> specs;
  std::map<std::string, double> weights;
  double bias = 0.0;
  // Simulated latency reported instead of wall-clock, so mock runs are
  // byte-reproducible.
  double seconds_per_token = 0.0005;
};

// Raw feature values (codes for categoricals) of the target profile, in spec
// order. Throws kUnparseableProfile.
std::vector<std::string> extract_profile(std::span<const Message> messages,
                                         std::span<const FeatureSpec> specs);

int mock_label(const std::vector<std::string>& values, const MockSpec& spec);

// '{"risk": r}' for Direct prompts; a short rationale ending in
// 'ANSWER_JSON: {"risk": r}' when the instructions ask for the delimiter.
// Non-final multi-turn requests are answered with the acknowledgment.
CompletionResult mock_complete(std::span<const Message> messages, const MockSpec& spec);

std::unique_ptr<Backend> make_mock_backend(MockSpec spec);

}  // namespace clinicl
