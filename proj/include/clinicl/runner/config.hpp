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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinicl/data/dataset.hpp"
#include "clinicl/gateway/gateway.hpp"
#include "clinicl/prompt/prompt.hpp"

namespace clinicl {

enum class Regime { kFull, kSampled };
std::string_view regime_name(Regime regime);  // "full", "sampled"
Regime parse_regime(std::string_view name);

// What a reply that cannot be parsed (or a case whose request failed) counts
// as when scoring a cell.
enum class FailurePolicy { kPositive, kNegative, kExclude };
std::string_view failure_policy_name(FailurePolicy policy);  // "positive", ...
FailurePolicy parse_failure_policy(std::string_view name);

enum class RankMetric { kF1, kF3 };
std::string_view rank_metric_name(RankMetric metric);  // "F1", "F3"
RankMetric parse_rank_metric(std::string_view name);

// Named seeds. Unset entries derive from the master seed and the entry name,
// so changing the master reseeds everything not pinned explicitly.
struct SeedPlan {
  std::uint64_t master = 0;
  std::map<std::string, std::uint64_t> pinned;

  std::uint64_t get(std::string_view name) const;
};

// Parameters of the offline mock model (see gateway/mock.hpp).
struct MockConfig {
  std::map<std::string, double> weights;
  double bias = 0.0;
  double seconds_per_token = 0.0005;
};

struct ExperimentConfig {
  std::string descriptor_path;
  DatasetDescriptor descriptor;
  std::vector<Regime> regimes = {Regime::kFull, Regime::kSampled};
  double test_fraction = 0.10;
  double sample_fraction = 0.5;
  // Baseline rows in report order; dummy rows are "Stratified" and "Random".
  std::vector<std::string> baseline_families = {"GB",     "RF",         "SVM",   "XGB",
                                                "LogReg", "Stratified", "Random"};
  // Models whose importances feed the knowledge tiers; empty selects every
  // non-dummy baseline.
  std::vector<std::string> knowledge_source_models;
  std::optional<GridConfig> grid = GridConfig{};
  GatewayConfig gateway;
  std::optional<MockConfig> mock;
  bool use_mock = false;
  SeedPlan seeds;
  std::size_t bootstrap_replicates = 1000;
  std::size_t search_draws = 20;
  std::size_t search_folds = 3;
  RankMetric rank_metric = RankMetric::kF1;
  FailurePolicy failure_policy = FailurePolicy::kPositive;
  // Fraction of a cell's cases whose requests may fail before the cell is
  // marked failed.
  double failure_ceiling = 0.10;
  bool dump_transcripts = false;
  std::string output_dir = "out";

  // Throws kConfigError.
  void validate() const;
};

// Relative paths inside the JSON resolve against `base_dir`. Throws
// kConfigError on schema problems.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace clinicl
