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

#include <string>
#include <string_view>
#include <vector>

namespace clinicl {

enum class ParseProvenance { kJsonDelimiter, kBareJson, kKeywordFallback };

std::string_view provenance_name(ParseProvenance provenance);

struct Prediction {
  int label = 0;
  ParseProvenance provenance = ParseProvenance::kJsonDelimiter;
  std::string raw_text;
  bool operator==(const Prediction&) const = default;
};

struct LexiconEntry {
  std::string phrase;  // lower case
  int polarity = 0;
};

// "phrase<TAB>polarity" lines; blank lines and '#' comments are skipped.
std::vector<LexiconEntry> parse_lexicon(std::string_view text);
const std::vector<LexiconEntry>& default_lexicon();

inline constexpr std::string_view kAnswerDelimiter = "ANSWER_JSON:";

// Tries, in order: the last "ANSWER_JSON:" followed by an object with an
// integer "risk"; the last balanced {...} object with a "risk" field; the
// last case-insensitive whole-word lexicon hit (the longer phrase wins when
// two start at the same offset). Single-quoted JSON is accepted. Throws
// kAmbiguousJson when the selected object's risk is not 0 or 1 and
// kParseFailure when nothing matches.
Prediction parse_risk(std::string_view text);
Prediction parse_risk(std::string_view text, const std::vector<LexiconEntry>& lexicon);

}  // namespace clinicl
