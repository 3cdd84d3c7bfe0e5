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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clinicl/runner/config.hpp"
#include "clinicl/runner/results.hpp"
#include "clinicl/runner/summary.hpp"

namespace clinicl {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_markdown(const Table& table);
std::string to_csv(const Table& table);

// Recall, precision, F1 and F3 with intervals per model, full then sampled
// regime. Tuned baselines come first, then the best and average prompt
// cells, then the dummy baselines.
Table metrics_table(std::span<const ExperimentResult> results, std::string_view dataset,
                    RankMetric metric);

// Group gaps per model of one regime with mean and median rows for the
// prompt cells and for the baselines.
Table fairness_table(std::span<const ExperimentResult> results, std::string_view dataset,
                     std::string_view regime);

// Mean, median and range per (family, phase, regime) over configurations.
// Prompt cells contribute their mean per-case latency, baselines their
// training time and mean per-case inference time.
Table timing_table(std::span<const ExperimentResult> results, std::string_view dataset);

// One column pair per dataset, in the order given.
Table factor_table(const std::vector<FactorTable>& tables, bool pairwise);

// Long-format bootstrap replicates: dataset, regime, model, metric,
// replicate, value.
std::string replicate_csv(std::span<const ExperimentResult> results);

// One row per result keyed by (dataset, regime, id).
std::string results_csv(std::span<const ExperimentResult> results);

std::string summary_csv(const Summary& summary);
std::string factor_json(const FactorTable& table);

// Writes every table under `dir` and returns the written paths.
std::vector<std::string> emit_report(std::span<const ExperimentResult> results,
                                     const std::string& dir, RankMetric metric);

}  // namespace clinicl
