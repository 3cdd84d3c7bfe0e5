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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinicl/baselines/models.hpp"
#include "clinicl/metrics/metrics.hpp"
#include "clinicl/prompt/prompt.hpp"

namespace clinicl {

// Provenance tags of per-case records besides the parser's own.
inline constexpr std::string_view kModelProvenance = "Model";
inline constexpr std::string_view kParseFailureProvenance = "ParseFailure";
inline constexpr std::string_view kRequestFailureProvenance = "RequestFailure";

struct CaseRecord {
  std::size_t case_id = 0;  // row in the source table
  int label = 0;
  int group = 0;
  // Empty when the case is excluded from scoring.
  std::optional<int> prediction;
  std::string provenance;
  double latency_seconds = 0.0;
  int attempts = 0;
  std::string raw_text;
  bool operator==(const CaseRecord&) const = default;
};

struct Timing {
  std::optional<double> train_seconds;  // absent for prompt-only runs
  double total_inference_seconds = 0.0;
  double per_case_mean = 0.0;
  double per_case_median = 0.0;
  double per_case_min = 0.0;
  double per_case_max = 0.0;
};

struct ResultKey {
  std::string dataset;
  std::string regime;
  std::string id;  // baseline row name or grid cell key
  bool operator==(const ResultKey&) const = default;
  auto operator<=>(const ResultKey&) const = default;
};

enum class ResultKind { kBaseline, kLlm };

// Scoring inputs that travel with every result so that metrics can be
// recomputed from the persisted cases alone.
struct ScoringSetup {
  std::vector<std::string> group_names;
  int reference_group = 0;
  std::size_t replicates = 1000;
  std::uint64_t bootstrap_seed = 0;
};

struct ExperimentResult {
  ResultKey key;
  ResultKind kind = ResultKind::kBaseline;
  // Position in the baseline list or grid enumeration; orders rows.
  std::size_t ordinal = 0;
  std::string hash;  // experiment key digest
  std::optional<PromptConfig> prompt;
  std::optional<ModelSpec> model;
  ScoringSetup scoring;
  std::vector<CaseRecord> per_case;
  MetricReport metrics;
  FairnessReport fairness;
  Timing timing;
  std::size_t parse_failures = 0;
  std::size_t request_failures = 0;
  // Bootstrap replicate values behind the F1 and F3 intervals.
  std::vector<double> f1_replicates;
  std::vector<double> f3_replicates;
};

// Fills metrics, fairness, replicates and the per-case timing summary from
// per_case and scoring. Excluded cases are left out of every metric.
void score_result(ExperimentResult& result);

// Line-delimited JSON: a header object followed by one object per case.
// Replicates are recomputed on load rather than stored.
std::string serialize_result(const ExperimentResult& result);
ExperimentResult deserialize_result(std::string_view text);

// Deterministic digest of the inputs that determine a result's content.
std::string experiment_hash(std::string_view canonical_inputs);

// Every result file under `output_dir`/results, ordered by dataset,
// regime, kind (baselines first) and ordinal.
std::vector<ExperimentResult> load_results(const std::string& output_dir);

// Path of a result file: <output_dir>/results/<regime>/<id>.jsonl.
std::string result_path(const std::string& output_dir, const ResultKey& key);

// Summary statistics used by the timing tables.
struct Spread {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};
Spread spread_of(std::vector<double> values);

}  // namespace clinicl
