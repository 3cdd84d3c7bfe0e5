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

#include "clinicl/prompt/prompt.hpp"

#include <algorithm>

#include "clinicl/assets_generated.hpp"
#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

constexpr std::string_view kShotQuestion = "What is the answer for this patient?";

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

std::string answer_line(int label, Reasoning reasoning) {
  const std::string json = "{\"risk\": " + std::to_string(label) + "}";
  return reasoning == Reasoning::kCot ? "ANSWER_JSON: " + json : json;
}

std::string task_instruction(const PromptContext& ctx, Reasoning reasoning) {
  const std::string_view tmpl =
      reasoning == Reasoning::kCot ? assets::k_task_cot : assets::k_task_direct;
  return strip_trailing_newlines(render_template(tmpl, {{"outcome", ctx.outcome}}));
}

std::string labeled_value(const FeatureSpec& spec, const std::string& value) {
  if (spec.kind == FeatureKind::kCategorical) {
    const auto it = spec.value_labels.find(value);
    if (it != spec.value_labels.end()) return it->second;
  }
  return value;
}

void append_shot(std::vector<Message>& out, const Record& record, int label,
                 CommStyle style, Reasoning reasoning, const PromptContext& ctx) {
  const auto turns = encode_profile(record, style, ctx.specs);
  if (style == CommStyle::kNcMt) {
    for (const auto& t : turns) {
      out.push_back({Role::kUser, t});
      out.push_back({Role::kAssistant, std::string(kAcknowledgment)});
    }
    out.push_back({Role::kUser, std::string(kShotQuestion)});
  } else {
    out.push_back({Role::kUser, turns.front()});
  }
  out.push_back({Role::kAssistant, answer_line(label, reasoning)});
}

enum class Knowledge { kFull, kDominantOnly, kNone };

ChatTranscript render(const Record& target, const ShotSet& shots, int shots_used,
                      Knowledge knowledge, const PromptContext& ctx, const PromptConfig& cfg) {
  ChatTranscript t;
  std::string system = strip_trailing_newlines(render_template(
      assets::k_intro, {{"dataset", ctx.dataset_name}, {"outcome", ctx.outcome}}));
  if (knowledge != Knowledge::kNone) {
    const std::string domain =
        render_domain_block(*ctx.tiers, ctx.specs, knowledge == Knowledge::kFull);
    if (!domain.empty()) {
      system += "\n\n" + domain;
      t.domain_included = true;
      t.moderate_included = knowledge == Knowledge::kFull && !ctx.tiers->moderate.empty();
    }
  }
  if (shots_used > 0) {
    system += "\n\n" + strip_trailing_newlines(render_template(
                           assets::k_examples, {{"count", std::to_string(shots_used)}}));
  }
  t.messages.push_back({Role::kSystem, std::move(system)});

  const CommStyle shot_style = cfg.shot_style.value_or(cfg.comm_style);
  for (int i = 0; i < shots_used; ++i) {
    const auto k = static_cast<std::size_t>(i);
    append_shot(t.messages, shots.records[k], shots.labels[k], shot_style, cfg.reasoning, ctx);
  }

  const auto profile = encode_profile(target, cfg.comm_style, ctx.specs);
  const std::string task = task_instruction(ctx, cfg.reasoning);
  if (cfg.comm_style == CommStyle::kNcMt) {
    for (std::size_t i = 0; i < profile.size(); ++i) {
      std::string content = profile[i];
      if (i == 0) content = std::string(kProfileSentinel) + "\n" + content;
      t.messages.push_back({Role::kUser, std::move(content)});
      t.messages.push_back({Role::kAssistant, std::string(kAcknowledgment)});
    }
    t.messages.push_back({Role::kUser, task});
  } else {
    t.messages.push_back(
        {Role::kUser,
         strip_trailing_newlines(render_template(assets::k_target, {{"profile", profile.front()}})) +
             "\n\n" + task});
  }
  t.shots_used = shots_used;
  t.token_estimate = estimate_tokens(t.messages);
  return t;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const std::pair<Enum, std::string_view> (&table)[N], std::string_view name,
                std::string_view what) {
  for (const auto& [value, text] : table) {
    if (iequals(text, name)) return value;
  }
  throw Error(ErrorCode::kConfigError, "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(const std::pair<Enum, std::string_view> (&table)[N], Enum value) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "?";
}

constexpr std::pair<CommStyle, std::string_view> kStyles[] = {
    {CommStyle::kNcSt, "NC_ST"}, {CommStyle::kNcMt, "NC_MT"}, {CommStyle::kNlSt, "NL_ST"}};
constexpr std::pair<Reasoning, std::string_view> kReasonings[] = {
    {Reasoning::kDirect, "Direct"}, {Reasoning::kCot, "CoT"}};
constexpr std::pair<Role, std::string_view> kRoles[] = {
    {Role::kSystem, "system"}, {Role::kUser, "user"}, {Role::kAssistant, "assistant"}};

}  // namespace

std::string_view comm_style_name(CommStyle style) { return enum_name(kStyles, style); }
CommStyle parse_comm_style(std::string_view name) {
  return parse_enum(kStyles, name, "communication style");
}
std::string_view reasoning_name(Reasoning reasoning) { return enum_name(kReasonings, reasoning); }
Reasoning parse_reasoning(std::string_view name) {
  return parse_enum(kReasonings, name, "reasoning mode");
}
std::string_view role_name(Role role) { return enum_name(kRoles, role); }
Role parse_role(std::string_view name) { return parse_enum(kRoles, name, "role"); }

std::string PromptConfig::key() const {
  std::string k = "k" + std::to_string(shots) + "-" + std::string(comm_style_name(comm_style)) +
                  "-" + std::string(reasoning_name(reasoning)) + (use_knowledge ? "-K1" : "-K0");
  if (shot_style) k += "-S" + std::string(comm_style_name(*shot_style));
  return k;
}

Record record_of(const LabeledDataset& ds, std::size_t row) {
  Record r;
  for (std::size_t c = 0; c < ds.num_features(); ++c) r.push_back(ds.display_value(row, c));
  return r;
}

ShotSet select_shots(const LabeledDataset& train, int n, std::uint64_t seed) {
  if (n < 0 || n % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "shot count must be even and non-negative");
  }
  ShotSet s;
  if (n == 0) return s;
  const auto half = static_cast<std::size_t>(n / 2);
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < train.size(); ++i) {
    by_class[train.labels[i]].push_back(i);
  }
  std::vector<std::size_t> picked[2];
  for (int k = 1; k >= 0; --k) {
    const auto& pool = by_class[k];
    if (pool.size() < half) {
      throw Error(ErrorCode::kInsufficientExamples,
                  "need " + std::to_string(half) + " examples of class " + std::to_string(k) +
                      ", have " + std::to_string(pool.size()));
    }
    Rng rng(derive_seed(derive_seed(seed, "shots"), static_cast<std::uint64_t>(k)));
    for (const auto j : sample_without_replacement(rng, pool.size(), half)) {
      picked[k].push_back(pool[j]);
    }
  }
  for (std::size_t j = 0; j < half; ++j) {
    for (const int k : {1, 0}) {
      const std::size_t row = picked[k][j];
      s.rows.push_back(row);
      s.records.push_back(record_of(train, row));
      s.labels.push_back(k);
    }
  }
  s.positive_count = static_cast<int>(half);
  s.negative_count = static_cast<int>(half);
  return s;
}

std::vector<std::string> encode_profile(const Record& record, CommStyle style,
                                        std::span<const FeatureSpec> specs) {
  if (record.size() != specs.size()) {
    throw Error(ErrorCode::kMissingFeatureValue,
                "record has " + std::to_string(record.size()) + " values for " +
                    std::to_string(specs.size()) + " features");
  }
  std::vector<std::string> pairs;
  std::string narrative;
  for (std::size_t f = 0; f < specs.size(); ++f) {
    const auto& spec = specs[f];
    if (trim(record[f]).empty()) {
      throw Error(ErrorCode::kMissingFeatureValue, "no value for feature " + spec.name);
    }
    if (style == CommStyle::kNlSt) {
      narrative += render_template(spec.narration_template,
                                   {{"value", labeled_value(spec, record[f])}});
    } else {
      std::string pair = spec.short_name + ": " + record[f];
      if (!spec.unit.empty()) pair += " " + spec.unit;
      pairs.push_back(std::move(pair));
    }
  }
  switch (style) {
    case CommStyle::kNlSt:
      return {trim(narrative) + "."};
    case CommStyle::kNcMt:
      return pairs;
    case CommStyle::kNcSt: {
      std::string line;
      for (const auto& p : pairs) line += (line.empty() ? "" : ", ") + p;
      return {line};
    }
  }
  return {};
}

PromptContext make_context(const DatasetDescriptor& descriptor,
                           std::optional<KnowledgeTiers> tiers) {
  return PromptContext{descriptor.name, descriptor.outcome, descriptor.feature_specs,
                       std::move(tiers)};
}

std::size_t estimate_tokens(std::span<const Message> messages) {
  std::size_t words = 0;
  for (const auto& m : messages) words += count_whitespace_tokens(m.content);
  return (4 * words + 2) / 3;
}

ChatTranscript build_prompt(const Record& target, const ShotSet& shots,
                            const PromptContext& context, const PromptConfig& config) {
  if (config.token_budget == 0) throw Error(ErrorCode::kInvalidArgument, "token budget is zero");
  if (config.shots < 0 || config.shots % 2 != 0 ||
      static_cast<std::size_t>(config.shots) > shots.records.size()) {
    throw Error(ErrorCode::kInvalidArgument, "config asks for " + std::to_string(config.shots) +
                                                 " shots but " +
                                                 std::to_string(shots.records.size()) +
                                                 " were selected");
  }
  if (config.use_knowledge && !context.tiers) {
    throw Error(ErrorCode::kConfigError, "knowledge block requested without feature tiers");
  }
  std::vector<Knowledge> levels = {Knowledge::kNone};
  if (config.use_knowledge) levels = {Knowledge::kFull, Knowledge::kDominantOnly, Knowledge::kNone};
  // Shots go before any knowledge text.
  for (int n = config.shots; n >= 0; n -= 2) {
    auto t = render(target, shots, n, levels.front(), context, config);
    if (t.token_estimate <= config.token_budget) return t;
  }
  std::size_t smallest = 0;
  for (const Knowledge level : levels) {
    auto t = render(target, shots, 0, level, context, config);
    if (t.token_estimate <= config.token_budget) return t;
    smallest = t.token_estimate;
  }
  throw Error(ErrorCode::kBudgetUnsatisfiable,
              "bare prompt needs " + std::to_string(smallest) + " tokens, budget is " +
                  std::to_string(config.token_budget));
}

std::vector<PromptConfig> enumerate_grid(const GridConfig& grid) {
  if (grid.shots.empty() || grid.comm_styles.empty() || grid.reasonings.empty() ||
      grid.use_knowledge.empty()) {
    throw Error(ErrorCode::kEmptyAxis, "every grid axis needs at least one value");
  }
  for (const int s : grid.shots) {
    if (s < 0 || s % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "shot counts must be even");
  }
  std::vector<PromptConfig> out;
  for (const int s : grid.shots) {
    for (const CommStyle c : grid.comm_styles) {
      for (const Reasoning r : grid.reasonings) {
        for (const bool k : grid.use_knowledge) {
          out.push_back(PromptConfig{s, c, r, k, grid.token_budget, grid.seed, std::nullopt});
        }
      }
    }
  }
  return out;
}

std::string dump_transcript(const ChatTranscript& transcript) {
  std::string out;
  for (const auto& m : transcript.messages) {
    nlohmann::ordered_json j;
    j["role"] = role_name(m.role);
    j["content"] = m.content;
    out += j.dump() + "\n";
  }
  return out;
}

ChatTranscript load_transcript(std::string_view text) {
  ChatTranscript t;
  try {
    for (const auto& line : split(text, '\n')) {
      if (trim(line).empty()) continue;
      const auto j = nlohmann::json::parse(line);
      t.messages.push_back(
          {parse_role(j.at("role").get<std::string>()), j.at("content").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed transcript: ") + e.what());
  }
  t.token_estimate = estimate_tokens(t.messages);
  return t;
}

}  // namespace clinicl
