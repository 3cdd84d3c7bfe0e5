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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clinicl/baselines/models.hpp"
#include "clinicl/explain/tiers.hpp"
#include "clinicl/gateway/gateway.hpp"
#include "clinicl/runner/config.hpp"
#include "clinicl/runner/results.hpp"

namespace clinicl {

// Progress sink; receives human-readable lines, never credentials.
using LogFn = std::function<void(const std::string&)>;

// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPartial = 3;
inline constexpr int kExitExhausted = 4;

// Train/test data of one regime. Every regime shares the same seeded test
// split; the sampled regime subsamples the training split per class.
struct PreparedData {
  Regime regime = Regime::kFull;
  LabeledDataset train;
  LabeledDataset test;
};
PreparedData prepare_data(const ExperimentConfig& config, Regime regime);

// Preprocessing statistics for the `ingest` verb, as JSON text.
std::string ingest_report(const ExperimentConfig& config);

struct BaselineRun {
  std::vector<ExperimentResult> results;  // in configured order
  std::vector<TrainedModel> models;
  std::optional<KnowledgeTiers> tiers;    // absent without importance sources
  std::size_t reused = 0;                 // results taken from earlier runs
};

// Tunes, trains and scores every configured baseline on one regime and
// persists results, fitted models and the knowledge tiers. Results whose
// experiment key is unchanged are reused.
BaselineRun run_baselines(const ExperimentConfig& config, Regime regime, const LogFn& log = {});

// Aggregated importances of the chosen models bucketed into tiers.
KnowledgeTiers derive_tiers(const std::vector<TrainedModel>& models,
                            const std::vector<std::string>& sources,
                            const std::vector<std::string>& feature_names);

std::string tiers_path(const std::string& output_dir, Regime regime);
std::optional<KnowledgeTiers> load_tiers(const std::string& output_dir, Regime regime);

// A grid cell that produced no result.
struct CellFailure {
  ResultKey key;
  std::string reason;
  std::size_t failed_cases = 0;
  bool exhausted = false;  // at least one request ran out of retries
};

struct GridRun {
  std::vector<ExperimentResult> results;  // in grid order
  std::vector<CellFailure> failures;
  std::size_t reused = 0;
};

// The mock backend under --mock, the HTTP backend otherwise.
std::unique_ptr<Gateway> make_gateway(const ExperimentConfig& config);

// Runs every grid cell on one regime. Knowledge cells need `tiers`
// (kConfigError otherwise). Each finished cell is written atomically, so an
// interrupted run resumes where it stopped.
GridRun run_llm_grid(const ExperimentConfig& config, Regime regime, Gateway& gateway,
                     const std::optional<KnowledgeTiers>& tiers, const LogFn& log = {});

// Writes <output_dir>/manifest.json listing finished and failed cells.
void write_manifest(const std::string& output_dir, const std::vector<GridRun>& runs);

// kExitExhausted if any failure involved retry exhaustion, kExitPartial for
// other failures or request-failed cases, kExitOk otherwise.
int exit_code_for(const std::vector<GridRun>& runs);

}  // namespace clinicl
