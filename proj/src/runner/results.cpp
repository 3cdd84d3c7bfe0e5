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

#include "clinicl/runner/results.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <tuple>

#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/data/dataset.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using ojson = nlohmann::ordered_json;

ojson maybe(const MaybeReal& value) { return value ? ojson(*value) : ojson(nullptr); }

MaybeReal maybe_from(const ojson& node) {
  if (node.is_null()) return std::nullopt;
  return node.get<double>();
}

std::string_view kind_name(ResultKind kind) {
  return kind == ResultKind::kBaseline ? "baseline" : "llm";
}

ResultKind parse_kind(std::string_view name) {
  if (name == "baseline") return ResultKind::kBaseline;
  if (name == "llm") return ResultKind::kLlm;
  throw Error(ErrorCode::kConfigError, "unknown result kind '" + std::string(name) + "'");
}

ojson prompt_json(const PromptConfig& c) {
  ojson j;
  j["shots"] = c.shots;
  j["comm_style"] = comm_style_name(c.comm_style);
  j["reasoning"] = reasoning_name(c.reasoning);
  j["use_knowledge"] = c.use_knowledge;
  j["token_budget"] = c.token_budget;
  j["seed"] = c.seed;
  j["shot_style"] = c.shot_style ? ojson(comm_style_name(*c.shot_style)) : ojson(nullptr);
  return j;
}

PromptConfig prompt_from(const ojson& j) {
  PromptConfig c;
  c.shots = j.at("shots").get<int>();
  c.comm_style = parse_comm_style(j.at("comm_style").get<std::string>());
  c.reasoning = parse_reasoning(j.at("reasoning").get<std::string>());
  c.use_knowledge = j.at("use_knowledge").get<bool>();
  c.token_budget = j.at("token_budget").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("shot_style").is_null()) {
    c.shot_style = parse_comm_style(j.at("shot_style").get<std::string>());
  }
  return c;
}

ojson model_json(const ModelSpec& m) {
  ojson j;
  j["name"] = m.name;
  j["family"] = family_name(m.family);
  j["hyperparams"] = ojson(m.hyperparams);
  j["seed"] = m.seed;
  return j;
}

ModelSpec model_from(const ojson& j) {
  ModelSpec m;
  m.name = j.at("name").get<std::string>();
  m.family = parse_family(j.at("family").get<std::string>());
  m.hyperparams = j.at("hyperparams").get<HyperParams>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

ojson header_json(const ExperimentResult& r) {
  ojson h;
  h["type"] = "result";
  h["dataset"] = r.key.dataset;
  h["regime"] = r.key.regime;
  h["id"] = r.key.id;
  h["kind"] = kind_name(r.kind);
  h["ordinal"] = r.ordinal;
  h["hash"] = r.hash;
  h["prompt"] = r.prompt ? prompt_json(*r.prompt) : ojson(nullptr);
  h["model"] = r.model ? model_json(*r.model) : ojson(nullptr);
  h["scoring"] = {{"group_names", r.scoring.group_names},
                  {"reference_group", r.scoring.reference_group},
                  {"replicates", r.scoring.replicates},
                  {"bootstrap_seed", r.scoring.bootstrap_seed}};
  const MetricReport& m = r.metrics;
  ojson metrics;
  metrics["n"] = m.n;
  metrics["tp"] = m.counts.tp;
  metrics["fp"] = m.counts.fp;
  metrics["fn"] = m.counts.fn;
  metrics["tn"] = m.counts.tn;
  metrics["recall"] = maybe(m.recall);
  metrics["precision"] = maybe(m.precision);
  metrics["f1"] = maybe(m.f1);
  metrics["f3"] = maybe(m.f3);
  ojson ci = ojson::object();
  for (const auto& [name, interval] : m.ci) ci[name] = {interval.low, interval.high};
  metrics["ci"] = ci;
  h["metrics"] = metrics;
  h["fairness"] = {{"dp_diff", maybe(r.fairness.dp_diff)},
                   {"tpr_diff", maybe(r.fairness.tpr_diff)},
                   {"fpr_diff", maybe(r.fairness.fpr_diff)},
                   {"eod", maybe(r.fairness.eod)}};
  h["timing"] = {{"train_seconds", maybe(r.timing.train_seconds)},
                 {"total_inference_seconds", r.timing.total_inference_seconds},
                 {"per_case_mean", r.timing.per_case_mean},
                 {"per_case_median", r.timing.per_case_median},
                 {"per_case_min", r.timing.per_case_min},
                 {"per_case_max", r.timing.per_case_max}};
  h["parse_failures"] = r.parse_failures;
  h["request_failures"] = r.request_failures;
  return h;
}

ojson case_json(const CaseRecord& c) {
  ojson j;
  j["type"] = "case";
  j["case_id"] = c.case_id;
  j["label"] = c.label;
  j["group"] = c.group;
  j["prediction"] = c.prediction ? ojson(*c.prediction) : ojson(nullptr);
  j["provenance"] = c.provenance;
  j["latency_seconds"] = c.latency_seconds;
  j["attempts"] = c.attempts;
  j["raw"] = c.raw_text;
  return j;
}

CaseRecord case_from(const ojson& j) {
  CaseRecord c;
  c.case_id = j.at("case_id").get<std::size_t>();
  c.label = j.at("label").get<int>();
  c.group = j.at("group").get<int>();
  if (!j.at("prediction").is_null()) c.prediction = j.at("prediction").get<int>();
  c.provenance = j.at("provenance").get<std::string>();
  c.latency_seconds = j.at("latency_seconds").get<double>();
  c.attempts = j.at("attempts").get<int>();
  c.raw_text = j.at("raw").get<std::string>();
  return c;
}

}  // namespace

Spread spread_of(std::vector<double> values) {
  Spread s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.median = median(std::move(values));
  return s;
}

void score_result(ExperimentResult& result) {
  std::vector<int> preds, labels, groups;
  std::vector<double> latencies;
  result.parse_failures = 0;
  result.request_failures = 0;
  for (const CaseRecord& c : result.per_case) {
    latencies.push_back(c.latency_seconds);
    if (c.provenance == kParseFailureProvenance) ++result.parse_failures;
    if (c.provenance == kRequestFailureProvenance) ++result.request_failures;
    if (!c.prediction) continue;
    preds.push_back(*c.prediction);
    labels.push_back(c.label);
    groups.push_back(c.group);
  }
  const ScoringSetup& s = result.scoring;
  result.metrics = make_report(preds, labels, s.replicates, s.bootstrap_seed);
  result.f1_replicates.clear();
  result.f3_replicates.clear();
  // Same seed as make_report, so these are the draws behind its intervals.
  const auto replicates_of = [&](const MetricFn& fn, const MaybeReal& point) {
    if (!point || s.replicates == 0 || preds.size() < 2) return std::vector<double>{};
    try {
      return bootstrap(fn, preds, labels, s.replicates, s.bootstrap_seed).replicates;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooManyUndefinedReplicates) throw;
      return std::vector<double>{};
    }
  };
  result.f1_replicates =
      replicates_of([](const ConfusionCounts& c) { return f1(c); }, result.metrics.f1);
  result.f3_replicates =
      replicates_of([](const ConfusionCounts& c) { return f3(c); }, result.metrics.f3);
  try {
    result.fairness = fairness_gaps(preds, labels, groups, s.reference_group, s.group_names);
  } catch (const Error& e) {
    // Scored cases from a single group leave every gap undefined.
    if (e.code() != ErrorCode::kGroupCountInvalid) throw;
    result.fairness = FairnessReport{};
    result.fairness.group_names = s.group_names;
  }
  const Spread spread = spread_of(latencies);
  result.timing.total_inference_seconds = std::accumulate(latencies.begin(), latencies.end(), 0.0);
  result.timing.per_case_mean = spread.mean;
  result.timing.per_case_median = spread.median;
  result.timing.per_case_min = spread.min;
  result.timing.per_case_max = spread.max;
}

std::string serialize_result(const ExperimentResult& result) {
  std::string out = header_json(result).dump() + "\n";
  for (const CaseRecord& c : result.per_case) out += case_json(c).dump() + "\n";
  return out;
}

ExperimentResult deserialize_result(std::string_view text) {
  ExperimentResult r;
  bool have_header = false;
  try {
    for (const std::string& line : split(text, '\n')) {
      if (trim(line).empty()) continue;
      const ojson j = ojson::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "case") {
        if (!have_header) throw Error(ErrorCode::kConfigError, "case record before header");
        r.per_case.push_back(case_from(j));
        continue;
      }
      if (type != "result" || have_header) {
        throw Error(ErrorCode::kConfigError, "unexpected record type '" + type + "'");
      }
      have_header = true;
      r.key = {j.at("dataset").get<std::string>(), j.at("regime").get<std::string>(),
               j.at("id").get<std::string>()};
      r.kind = parse_kind(j.at("kind").get<std::string>());
      r.ordinal = j.at("ordinal").get<std::size_t>();
      r.hash = j.at("hash").get<std::string>();
      if (!j.at("prompt").is_null()) r.prompt = prompt_from(j.at("prompt"));
      if (!j.at("model").is_null()) r.model = model_from(j.at("model"));
      const ojson& s = j.at("scoring");
      r.scoring.group_names = s.at("group_names").get<std::vector<std::string>>();
      r.scoring.reference_group = s.at("reference_group").get<int>();
      r.scoring.replicates = s.at("replicates").get<std::size_t>();
      r.scoring.bootstrap_seed = s.at("bootstrap_seed").get<std::uint64_t>();
      r.timing.train_seconds = maybe_from(j.at("timing").at("train_seconds"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed result file: ") + e.what());
  }
  if (!have_header) throw Error(ErrorCode::kConfigError, "result file has no header");
  score_result(r);
  return r;
}

std::string experiment_hash(std::string_view canonical_inputs) {
  return sha256_hex(canonical_inputs).substr(0, 16);
}

std::string result_path(const std::string& output_dir, const ResultKey& key) {
  return (std::filesystem::path(output_dir) / "results" / key.regime / (key.id + ".jsonl"))
      .string();
}

std::vector<ExperimentResult> load_results(const std::string& output_dir) {
  std::vector<ExperimentResult> out;
  const std::filesystem::path root = std::filesystem::path(output_dir) / "results";
  if (!std::filesystem::exists(root)) return out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
    out.push_back(deserialize_result(read_file(entry.path().string())));
  }
  std::sort(out.begin(), out.end(), [](const ExperimentResult& a, const ExperimentResult& b) {
    return std::tie(a.key.dataset, a.key.regime, a.kind, a.ordinal, a.key.id) <
           std::tie(b.key.dataset, b.key.regime, b.kind, b.ordinal, b.key.id);
  });
  return out;
}

}  // namespace clinicl
