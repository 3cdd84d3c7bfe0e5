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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clinicl/data/dataset.hpp"
#include "clinicl/explain/tiers.hpp"

namespace clinicl {

enum class CommStyle { kNcSt, kNcMt, kNlSt };
enum class Reasoning { kDirect, kCot };
enum class Role { kSystem, kUser, kAssistant };

std::string_view comm_style_name(CommStyle style);  // "NC_ST", "NC_MT", "NL_ST"
CommStyle parse_comm_style(std::string_view name);
std::string_view reasoning_name(Reasoning reasoning);  // "Direct", "CoT"
Reasoning parse_reasoning(std::string_view name);
std::string_view role_name(Role role);
Role parse_role(std::string_view name);

inline constexpr std::size_t kDefaultTokenBudget = 4096;
inline constexpr std::string_view kAcknowledgment = "Noted.";
inline constexpr std::string_view kProfileSentinel = "### Patient profile";

struct PromptConfig {
  int shots = 0;
  CommStyle comm_style = CommStyle::kNlSt;
  Reasoning reasoning = Reasoning::kDirect;
  bool use_knowledge = false;
  std::size_t token_budget = kDefaultTokenBudget;
  std::uint64_t seed = 0;
  // Renders shots in a different style from the target profile when set.
  std::optional<CommStyle> shot_style;

  // Stable cell identifier, e.g. "k16-NL_ST-CoT-K1".
  std::string key() const;
};

struct Message {
  Role role = Role::kUser;
  std::string content;
  bool operator==(const Message&) const = default;
};

struct ChatTranscript {
  std::vector<Message> messages;
  std::size_t token_estimate = 0;
  // What survived budget enforcement.
  int shots_used = 0;
  bool moderate_included = false;
  bool domain_included = false;
};

// Display text of each feature in descriptor order.
using Record = std::vector<std::string>;

Record record_of(const LabeledDataset& ds, std::size_t row);

struct ShotSet {
  std::vector<Record> records;
  std::vector<int> labels;
  std::vector<std::size_t> rows;  // indices into the training split
  int positive_count = 0;
  int negative_count = 0;
};

// n/2 positives and n/2 negatives sampled without replacement per class and
// interleaved positive first. Throws kInsufficientExamples.
ShotSet select_shots(const LabeledDataset& train, int n, std::uint64_t seed);

// One turn for NC_ST and NL_ST; one turn per feature for NC_MT. Throws
// kMissingFeatureValue for an empty value or a record of the wrong width.
std::vector<std::string> encode_profile(const Record& record, CommStyle style,
                                        std::span<const FeatureSpec> specs);

// Dataset-level wording and knowledge shared by every prompt of a run.
struct PromptContext {
  std::string dataset_name;
  std::string outcome;
  std::vector<FeatureSpec> specs;
  std::optional<KnowledgeTiers> tiers;
};

PromptContext make_context(const DatasetDescriptor& descriptor,
                           std::optional<KnowledgeTiers> tiers = std::nullopt);

// ceil(4/3 x whitespace tokens) summed over the messages.
std::size_t estimate_tokens(std::span<const Message> messages);

// Intro, Domain, Shots, Profile and TaskInst in that order. Over budget, shot
// pairs are dropped last-selected first, then the moderate tier, then the
// whole domain block. Throws kBudgetUnsatisfiable when the bare prompt still
// exceeds the budget and kConfigError when knowledge is requested without
// tiers.
ChatTranscript build_prompt(const Record& target, const ShotSet& shots,
                            const PromptContext& context, const PromptConfig& config);

struct GridConfig {
  std::vector<int> shots = {0, 16};
  std::vector<CommStyle> comm_styles = {CommStyle::kNcMt, CommStyle::kNlSt};
  std::vector<Reasoning> reasonings = {Reasoning::kDirect, Reasoning::kCot};
  std::vector<bool> use_knowledge = {true, false};
  std::size_t token_budget = kDefaultTokenBudget;
  std::uint64_t seed = 0;
};

// Cartesian product with shots outermost and knowledge innermost. Throws
// kEmptyAxis, and kInvalidArgument for odd or negative shot counts.
std::vector<PromptConfig> enumerate_grid(const GridConfig& grid);

// One JSON object per line: {"role": ..., "content": ...}.
std::string dump_transcript(const ChatTranscript& transcript);
ChatTranscript load_transcript(std::string_view text);

}  // namespace clinicl
