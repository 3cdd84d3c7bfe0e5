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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clinicl/metrics/metrics.hpp"
#include "clinicl/runner/config.hpp"
#include "clinicl/runner/results.hpp"

namespace clinicl {

inline constexpr std::size_t kTopK = 10;

struct RankedRow {
  ResultKey key;
  ResultKind kind = ResultKind::kBaseline;
  MaybeReal recall;
  MaybeReal precision;
  MaybeReal f1;
  MaybeReal f3;
  std::size_t rank = 0;  // 1 = best
  bool top10 = false;
};

struct AggregateRow {
  std::string label;  // "LLM mean", "LLM median"
  MaybeReal recall;
  MaybeReal precision;
  MaybeReal f1;
  MaybeReal f3;
};

struct Summary {
  RankMetric metric = RankMetric::kF1;
  std::vector<RankedRow> rows;  // best first
  std::vector<AggregateRow> aggregates;  // empty without prompt results
};

// Ranks by the chosen metric, descending. Ties and undefined values (ranked
// last) keep input order. Aggregates average the defined values of prompt
// results only.
Summary rank_and_summarize(std::span<const ExperimentResult> results, RankMetric metric);

enum class Factor { kStyle, kShots, kCot, kKnowledge };
// NL_ST = 1 else 0; shot count; CoT = 1 else 0; knowledge = 1 else 0.
double encode_factor(const PromptConfig& config, Factor factor);

struct FactorRow {
  std::string label;
  MaybeReal rho_rank;   // spearman(encoding, rank); undefined when degenerate
  MaybeReal r_top10;    // point_biserial(top-10 flag, encoding)
};

struct FactorTable {
  std::string dataset;
  std::string regime;
  std::vector<FactorRow> individual;  // style, shots, CoT, knowledge
  std::vector<FactorRow> pairwise;    // products of two encodings
};

// Ranks the prompt results among themselves and correlates each factor with
// rank and top-10 membership. Throws kInvalidArgument for results without a
// prompt configuration.
FactorTable analyze_factors(std::span<const ExperimentResult> results, RankMetric metric);

// Mann-Whitney U over the F3 bootstrap replicates of the best prompt result
// and the best tuned baseline.
struct ReplicateComparison {
  ResultKey llm;
  ResultKey baseline;
  MannWhitney test;
};
std::optional<ReplicateComparison> compare_best(std::span<const ExperimentResult> results,
                                                RankMetric metric);

}  // namespace clinicl
