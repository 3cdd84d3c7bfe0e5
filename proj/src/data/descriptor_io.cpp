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

#include "clinicl/data/descriptor_io.hpp"

#include <filesystem>
#include <set>

#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using nlohmann::json;

std::string scalar_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return format_number(value.get<double>());
  throw Error(ErrorCode::kConfigError, "expected a string or number, got " + value.dump());
}

std::string required_string(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kConfigError, std::string("descriptor field '") + key +
                                             "' must be a string");
  }
  return obj[key].get<std::string>();
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

FeatureSpec parse_feature(const json& obj) {
  FeatureSpec spec;
  spec.name = required_string(obj, "name");
  spec.short_name = obj.value("short_name", spec.name);
  spec.long_name = obj.value("long_name", spec.name);
  const std::string kind = obj.value("kind", "numeric");
  if (kind == "numeric") {
    spec.kind = FeatureKind::kNumeric;
  } else if (kind == "categorical") {
    spec.kind = FeatureKind::kCategorical;
  } else {
    throw Error(ErrorCode::kConfigError, "feature " + spec.name + ": unknown kind '" + kind + "'");
  }
  spec.unit = obj.value("unit", "");
  if (obj.contains("value_labels")) {
    for (const auto& [raw, phrase] : obj["value_labels"].items()) {
      std::string key = raw;
      if (const auto v = parse_number(key)) key = format_number(*v);
      spec.value_labels[key] = scalar_text(phrase);
    }
  }
  spec.narration_template = obj.value("narration", " " + spec.long_name + " {value}");
  if (spec.kind == FeatureKind::kCategorical && spec.value_labels.empty()) {
    throw Error(ErrorCode::kConfigError,
                "categorical feature " + spec.name + " needs value_labels");
  }
  if (count_occurrences(spec.narration_template, "{value}") != 1) {
    throw Error(ErrorCode::kConfigError,
                "narration for " + spec.name + " must contain exactly one {value}");
  }
  return spec;
}

}  // namespace

DatasetDescriptor parse_descriptor(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("descriptor is not valid JSON: ") + e.what());
  }
  DatasetDescriptor d;
  d.name = required_string(doc, "name");
  d.outcome = doc.value("outcome", d.outcome);
  d.csv_path = required_string(doc, "csv_path");
  if (!base_dir.empty() && std::filesystem::path(d.csv_path).is_relative()) {
    d.csv_path = (std::filesystem::path(base_dir) / d.csv_path).lexically_normal().string();
  }
  d.target_column = required_string(doc, "target_column");
  d.positive_label_rule = required_string(doc, "positive_label_rule");
  d.group_column = doc.value("group_column", "");
  if (doc.contains("reference_group")) d.reference_group = scalar_text(doc["reference_group"]);
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorCode::kConfigError, "descriptor needs a 'features' array");
  }
  std::set<std::string> seen;
  for (const auto& f : doc["features"]) {
    d.feature_specs.push_back(parse_feature(f));
    if (!seen.insert(d.feature_specs.back().name).second) {
      throw Error(ErrorCode::kConfigError, "duplicate feature " + d.feature_specs.back().name);
    }
    if (d.feature_specs.back().name == d.target_column) {
      throw Error(ErrorCode::kConfigError, "the target column cannot be a feature");
    }
  }
  return d;
}

DatasetDescriptor load_descriptor(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::kConfigError, "cannot read descriptor " + path);
  }
  return parse_descriptor(text, std::filesystem::path(path).parent_path().string());
}

}  // namespace clinicl
