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

#include "clinicl/runner/summary.hpp"

#include <algorithm>
#include <numeric>

#include "clinicl/common/error.hpp"
#include "clinicl/data/dataset.hpp"

namespace clinicl {
namespace {

MaybeReal metric_of(const MetricReport& m, RankMetric metric) {
  return metric == RankMetric::kF1 ? m.f1 : m.f3;
}

MaybeReal mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

MaybeReal median_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return median(v);
}

template <typename Fn>
MaybeReal guarded(Fn fn) {
  try {
    return fn();
  } catch (const Error&) {
    // Constant or single-class inputs leave the correlation undefined.
    return std::nullopt;
  }
}

constexpr std::pair<Factor, const char*> kIndividual[] = {
    {Factor::kStyle, "NL-ST style"},
    {Factor::kShots, "Shots (#examples)"},
    {Factor::kCot, "CoT reasoning"},
    {Factor::kKnowledge, "Knowledge context"},
};

const char* short_name(Factor f) {
  switch (f) {
    case Factor::kStyle:
      return "style";
    case Factor::kShots:
      return "shots";
    case Factor::kCot:
      return "cot";
    case Factor::kKnowledge:
      return "knowledge";
  }
  return "?";
}

}  // namespace

Summary rank_and_summarize(std::span<const ExperimentResult> results, RankMetric metric) {
  Summary s;
  s.metric = metric;
  std::vector<std::size_t> order(results.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const MaybeReal va = metric_of(results[a].metrics, metric);
    const MaybeReal vb = metric_of(results[b].metrics, metric);
    if (!vb) return va.has_value();
    return va && *va > *vb;
  });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const ExperimentResult& r = results[order[pos]];
    RankedRow row;
    row.key = r.key;
    row.kind = r.kind;
    row.recall = r.metrics.recall;
    row.precision = r.metrics.precision;
    row.f1 = r.metrics.f1;
    row.f3 = r.metrics.f3;
    row.rank = pos + 1;
    row.top10 = row.rank <= kTopK;
    s.rows.push_back(row);
  }
  std::vector<double> rec, prec, f1s, f3s;
  for (const ExperimentResult& r : results) {
    if (r.kind != ResultKind::kLlm) continue;
    if (r.metrics.recall) rec.push_back(*r.metrics.recall);
    if (r.metrics.precision) prec.push_back(*r.metrics.precision);
    if (r.metrics.f1) f1s.push_back(*r.metrics.f1);
    if (r.metrics.f3) f3s.push_back(*r.metrics.f3);
  }
  const bool any_llm = std::any_of(results.begin(), results.end(), [](const ExperimentResult& r) {
    return r.kind == ResultKind::kLlm;
  });
  if (any_llm) {
    s.aggregates.push_back({"LLM mean", mean_of(rec), mean_of(prec), mean_of(f1s), mean_of(f3s)});
    s.aggregates.push_back(
        {"LLM median", median_of(rec), median_of(prec), median_of(f1s), median_of(f3s)});
  }
  return s;
}

double encode_factor(const PromptConfig& config, Factor factor) {
  switch (factor) {
    case Factor::kStyle:
      return config.comm_style == CommStyle::kNlSt ? 1.0 : 0.0;
    case Factor::kShots:
      return static_cast<double>(config.shots);
    case Factor::kCot:
      return config.reasoning == Reasoning::kCot ? 1.0 : 0.0;
    case Factor::kKnowledge:
      return config.use_knowledge ? 1.0 : 0.0;
  }
  return 0.0;
}

FactorTable analyze_factors(std::span<const ExperimentResult> results, RankMetric metric) {
  FactorTable table;
  for (const ExperimentResult& r : results) {
    if (!r.prompt) {
      throw Error(ErrorCode::kInvalidArgument, r.key.id + " has no prompt configuration");
    }
  }
  if (!results.empty()) {
    table.dataset = results.front().key.dataset;
    table.regime = results.front().key.regime;
  }
  const Summary summary = rank_and_summarize(results, metric);
  // Back to input order so ranks line up with configurations.
  std::vector<double> rank(results.size());
  std::vector<int> top(results.size());
  for (const RankedRow& row : summary.rows) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].key == row.key) {
        rank[i] = static_cast<double>(row.rank);
        top[i] = row.top10 ? 1 : 0;
      }
    }
  }
  const auto encoded = [&](Factor f) {
    std::vector<double> v;
    for (const ExperimentResult& r : results) v.push_back(encode_factor(*r.prompt, f));
    return v;
  };
  const auto row_for = [&](std::string label, const std::vector<double>& x) {
    return FactorRow{std::move(label), guarded([&] { return spearman(x, rank); }),
                     guarded([&] { return point_biserial(top, x); })};
  };
  for (const auto& [factor, label] : kIndividual) {
    table.individual.push_back(row_for(label, encoded(factor)));
  }
  for (std::size_t a = 0; a < std::size(kIndividual); ++a) {
    for (std::size_t b = a + 1; b < std::size(kIndividual); ++b) {
      const auto xa = encoded(kIndividual[a].first);
      const auto xb = encoded(kIndividual[b].first);
      std::vector<double> product(xa.size());
      for (std::size_t i = 0; i < xa.size(); ++i) product[i] = xa[i] * xb[i];
      table.pairwise.push_back(row_for(std::string(short_name(kIndividual[a].first)) + " × " +
                                           short_name(kIndividual[b].first),
                                       product));
    }
  }
  return table;
}

std::optional<ReplicateComparison> compare_best(std::span<const ExperimentResult> results,
                                                RankMetric metric) {
  const ExperimentResult* best[2] = {nullptr, nullptr};  // llm, tuned baseline
  for (const ExperimentResult& r : results) {
    if (r.f3_replicates.empty()) continue;
    if (r.kind == ResultKind::kBaseline && (!r.model || is_dummy(r.model->family))) continue;
    const ExperimentResult*& slot = best[r.kind == ResultKind::kLlm ? 0 : 1];
    const MaybeReal v = metric_of(r.metrics, metric);
    if (!v) continue;
    if (!slot || *v > *metric_of(slot->metrics, metric)) slot = &r;
  }
  if (!best[0] || !best[1]) return std::nullopt;
  return ReplicateComparison{best[0]->key, best[1]->key,
                             mann_whitney_u(best[0]->f3_replicates, best[1]->f3_replicates)};
}

}  // namespace clinicl
