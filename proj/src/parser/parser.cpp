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

#include "clinicl/parser/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "clinicl/assets_generated.hpp"
#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using nlohmann::json;

// End (one past '}') of the object opening at `open`, honouring quoted
// strings of either quote style; npos when unbalanced.
std::size_t matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}' && --depth == 0) {
      return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> parse_object(std::string_view candidate) {
  auto parsed = json::parse(candidate, nullptr, false);
  if (parsed.is_discarded()) {
    std::string swapped(candidate);
    std::replace(swapped.begin(), swapped.end(), '\'', '"');
    parsed = json::parse(swapped, nullptr, false);
  }
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

// Label for an object carrying "risk"; nullopt when the field is absent.
std::optional<int> risk_of(const json& obj) {
  const auto it = obj.find("risk");
  if (it == obj.end()) return std::nullopt;
  std::optional<double> v;
  if (it->is_number()) {
    v = it->get<double>();
  } else if (it->is_string()) {
    v = parse_number(it->get<std::string>());
  }
  if (v && (*v == 0.0 || *v == 1.0)) return static_cast<int>(*v);
  throw Error(ErrorCode::kAmbiguousJson, "\"risk\" must be 0 or 1, got " + it->dump());
}

std::optional<int> object_at(std::string_view text, std::size_t open) {
  const std::size_t end = matching_brace(text, open);
  if (end == std::string_view::npos) return std::nullopt;
  const auto obj = parse_object(text.substr(open, end - open));
  if (!obj) return std::nullopt;
  return risk_of(*obj);
}

std::optional<int> after_delimiter(std::string_view text) {
  std::size_t pos = text.rfind(kAnswerDelimiter);
  while (pos != std::string_view::npos) {
    std::size_t i = pos + kAnswerDelimiter.size();
    const auto skip_space = [&] {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_space();
    // Tolerate a code fence ("```json") or backtick before the object.
    while (i < text.size() && text[i] == '`') ++i;
    if (text.substr(i, 4) == "json") i += 4;
    skip_space();
    if (i < text.size() && text[i] == '{') {
      if (const auto r = object_at(text, i)) return r;
    }
    if (pos == 0) break;
    pos = text.rfind(kAnswerDelimiter, pos - 1);
  }
  return std::nullopt;
}

std::optional<int> last_object(std::string_view text) {
  std::size_t pos = text.rfind('{');
  while (pos != std::string_view::npos) {
    if (const auto r = object_at(text, pos)) return r;
    if (pos == 0) break;
    pos = text.rfind('{', pos - 1);
  }
  return std::nullopt;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::optional<int> last_keyword(std::string_view text, const std::vector<LexiconEntry>& lexicon) {
  const std::string lower = to_lower(text);
  std::size_t best_start = 0;
  std::size_t best_len = 0;
  std::optional<int> label;
  for (const auto& entry : lexicon) {
    const std::string& phrase = entry.phrase;
    if (phrase.empty()) continue;
    for (std::size_t pos = lower.find(phrase); pos != std::string::npos;
         pos = lower.find(phrase, pos + 1)) {
      const std::size_t end = pos + phrase.size();
      const bool bounded = (pos == 0 || !is_word_char(lower[pos - 1])) &&
                           (end == lower.size() || !is_word_char(lower[end]));
      if (!bounded) continue;
      if (!label || pos > best_start || (pos == best_start && phrase.size() > best_len)) {
        best_start = pos;
        best_len = phrase.size();
        label = entry.polarity;
      }
    }
  }
  return label;
}

}  // namespace

std::string_view provenance_name(ParseProvenance provenance) {
  switch (provenance) {
    case ParseProvenance::kJsonDelimiter:
      return "JsonDelimiter";
    case ParseProvenance::kBareJson:
      return "BareJson";
    case ParseProvenance::kKeywordFallback:
      return "KeywordFallback";
  }
  return "?";
}

std::vector<LexiconEntry> parse_lexicon(std::string_view text) {
  std::vector<LexiconEntry> out;
  for (const auto& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.rfind('\t');
    const auto polarity = tab == std::string::npos ? std::nullopt : parse_number(line.substr(tab + 1));
    if (!polarity || (*polarity != 0.0 && *polarity != 1.0)) {
      throw Error(ErrorCode::kConfigError, "bad lexicon line '" + line + "'");
    }
    out.push_back({to_lower(trim(line.substr(0, tab))), static_cast<int>(*polarity)});
  }
  return out;
}

const std::vector<LexiconEntry>& default_lexicon() {
  static const std::vector<LexiconEntry> lexicon = parse_lexicon(assets::k_lexicon);
  return lexicon;
}

Prediction parse_risk(std::string_view text) { return parse_risk(text, default_lexicon()); }

Prediction parse_risk(std::string_view text, const std::vector<LexiconEntry>& lexicon) {
  Prediction p;
  p.raw_text = std::string(text);
  if (const auto r = after_delimiter(text)) {
    p.label = *r;
    p.provenance = ParseProvenance::kJsonDelimiter;
    return p;
  }
  if (const auto r = last_object(text)) {
    p.label = *r;
    p.provenance = ParseProvenance::kBareJson;
    return p;
  }
  if (const auto r = last_keyword(text, lexicon)) {
    p.label = *r;
    p.provenance = ParseProvenance::kKeywordFallback;
    return p;
  }
  throw Error(ErrorCode::kParseFailure, "no risk label found in model output");
}

}  // namespace clinicl
