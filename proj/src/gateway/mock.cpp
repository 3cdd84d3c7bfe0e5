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

#include "clinicl/gateway/mock.hpp"

#include <algorithm>
#include <optional>

#include "clinicl/common/text.hpp"

namespace clinicl {
namespace {

constexpr std::string_view kInstructionSentinel = "### Instructions";

[[noreturn]] void unparseable(const std::string& why) {
  throw Error(ErrorCode::kUnparseableProfile, "mock cannot read the target profile: " + why);
}

struct Slot {
  std::string prefix;
  std::string suffix;
};

// Candidate display texts of a value and the raw code each maps back to.
std::vector<std::pair<std::string, std::string>> label_candidates(const FeatureSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [code, label] : spec.value_labels) out.emplace_back(label, code);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  return out;
}

// Sequentially matches "prefix value suffix" slots against `text`. A value
// ends at its suffix, or at the next slot's prefix when the suffix is empty.
std::vector<std::string> match_slots(std::string_view text, const std::vector<Slot>& slots,
                                     std::span<const FeatureSpec> specs, bool labeled) {
  std::vector<std::string> values;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < slots.size(); ++f) {
    const Slot& s = slots[f];
    if (text.substr(pos, s.prefix.size()) != s.prefix) {
      unparseable("expected '" + s.prefix + "' for " + specs[f].name);
    }
    pos += s.prefix.size();
    const std::string terminator =
        !s.suffix.empty() ? s.suffix : (f + 1 < slots.size() ? slots[f + 1].prefix : "");
    const auto ends_here = [&](std::size_t end) {
      return terminator.empty() ? end == text.size()
                                : text.substr(end, terminator.size()) == terminator;
    };
    std::optional<std::string> value;
    if (labeled) {
      for (const auto& [label, code] : label_candidates(specs[f])) {
        if (text.substr(pos, label.size()) == label && ends_here(pos + label.size())) {
          value = code;
          pos += label.size();
          break;
        }
      }
    }
    if (!value) {
      const std::size_t end = terminator.empty() ? text.size() : text.find(terminator, pos);
      if (end == std::string_view::npos || end == pos) unparseable("no value for " + specs[f].name);
      value = std::string(text.substr(pos, end - pos));
      pos = end;
    }
    pos += s.suffix.size();
    values.push_back(std::move(*value));
  }
  if (pos != text.size()) unparseable("trailing text after the last feature");
  return values;
}

std::vector<Slot> numeric_slots(std::span<const FeatureSpec> specs) {
  std::vector<Slot> slots;
  for (std::size_t f = 0; f < specs.size(); ++f) {
    slots.push_back({(f == 0 ? "" : ", ") + specs[f].short_name + ": ",
                     specs[f].unit.empty() ? "" : " " + specs[f].unit});
  }
  return slots;
}

std::vector<Slot> narrative_slots(std::span<const FeatureSpec> specs) {
  std::vector<Slot> slots;
  for (const auto& spec : specs) {
    const auto at = spec.narration_template.find("{value}");
    slots.push_back({spec.narration_template.substr(0, at),
                     spec.narration_template.substr(at + 7)});
  }
  // The rendered paragraph is trimmed, so the first prefix loses its
  // leading blanks.
  if (!slots.empty()) {
    auto& lead = slots[0].prefix;
    lead.erase(0, lead.find_first_not_of(" \t\n"));
  }
  return slots;
}

bool is_final_turn(std::span<const Message> messages) {
  return !messages.empty() && messages.back().role == Role::kUser &&
         messages.back().content.find(kInstructionSentinel) != std::string::npos;
}

}  // namespace

std::vector<std::string> extract_profile(std::span<const Message> messages,
                                         std::span<const FeatureSpec> specs) {
  std::size_t start = messages.size();
  for (std::size_t i = messages.size(); i-- > 0;) {
    if (messages[i].role == Role::kUser &&
        messages[i].content.find(kProfileSentinel) != std::string::npos) {
      start = i;
      break;
    }
  }
  if (start == messages.size()) unparseable("no profile sentinel");
  const std::string& first = messages[start].content;
  std::string body = first.substr(first.find(kProfileSentinel) + kProfileSentinel.size());
  if (!body.empty() && body[0] == '\n') body.erase(0, 1);

  if (const auto instr = body.find(kInstructionSentinel); instr != std::string::npos) {
    // Single-turn: the profile shares a message with the instructions.
    const std::string profile = trim(body.substr(0, instr));
    const std::string lead = specs.empty() ? "" : specs[0].short_name + ": ";
    if (!lead.empty() && profile.rfind(lead, 0) == 0) {
      return match_slots(profile, numeric_slots(specs), specs, false);
    }
    if (profile.empty() || profile.back() != '.') unparseable("narrative lacks a final period");
    return match_slots(std::string_view(profile).substr(0, profile.size() - 1),
                       narrative_slots(specs), specs, true);
  }
  // Multi-turn: one "Name: value unit" user turn per feature.
  std::vector<std::string> turns = {body};
  for (std::size_t i = start + 1; i < messages.size() && turns.size() < specs.size(); ++i) {
    if (messages[i].role == Role::kUser) turns.push_back(messages[i].content);
  }
  if (turns.size() != specs.size()) unparseable("expected one turn per feature");
  const auto slots = numeric_slots(specs);
  std::vector<std::string> values;
  for (std::size_t f = 0; f < specs.size(); ++f) {
    const Slot single{specs[f].short_name + ": ", slots[f].suffix};
    auto one = match_slots(turns[f], {single}, specs.subspan(f, 1), false);
    values.push_back(std::move(one.front()));
  }
  return values;
}

int mock_label(const std::vector<std::string>& values, const MockSpec& spec) {
  double score = spec.bias;
  for (std::size_t f = 0; f < spec.specs.size(); ++f) {
    const auto it = spec.weights.find(spec.specs[f].name);
    if (it == spec.weights.end() || it->second == 0.0) continue;
    const auto v = parse_number(values[f]);
    if (!v) unparseable("non-numeric value '" + values[f] + "' for " + spec.specs[f].name);
    score += it->second * *v;
  }
  return score > 0 ? 1 : 0;
}

CompletionResult mock_complete(std::span<const Message> messages, const MockSpec& spec) {
  CompletionResult r;
  const std::size_t prompt_tokens = estimate_tokens(messages);
  r.latency_seconds = spec.seconds_per_token * static_cast<double>(prompt_tokens);
  if (!is_final_turn(messages)) {
    r.text = std::string(kAcknowledgment);
  } else {
    const auto values = extract_profile(messages, spec.specs);
    const int label = mock_label(values, spec);
    const std::string answer = "{\"risk\": " + std::to_string(label) + "}";
    if (messages.back().content.find("ANSWER_JSON:") != std::string::npos) {
      r.text = "Weighing the recorded attributes against the reference rule, the combined score "
               "is " + std::string(label ? "above" : "at or below") +
               " the decision threshold.\nANSWER_JSON: " + answer;
    } else {
      r.text = answer;
    }
  }
  r.usage = TokenUsage{static_cast<int>(prompt_tokens),
                       static_cast<int>(count_whitespace_tokens(r.text))};
  return r;
}

namespace {

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockSpec spec) : spec_(std::move(spec)) {}

  AttemptOutcome send(std::span<const Message> messages, const GatewayConfig&) override {
    AttemptOutcome out;
    try {
      auto r = mock_complete(messages, spec_);
      out.status = 200;
      out.text = std::move(r.text);
      out.usage = r.usage;
      out.simulated_seconds = r.latency_seconds;
    } catch (const Error& e) {
      // An unreadable prompt is the client's fault.
      out.status = 400;
      out.error = e.what();
    }
    return out;
  }

 private:
  MockSpec spec_;
};

}  // namespace

std::unique_ptr<Backend> make_mock_backend(MockSpec spec) {
  return std::make_unique<MockBackend>(std::move(spec));
}

}  // namespace clinicl
