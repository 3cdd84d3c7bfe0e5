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

#include "clinicl/runner/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>

#include "clinicl/common/text.hpp"
#include "clinicl/data/csv.hpp"
#include "clinicl/data/dataset.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kUndefined = "undef";
constexpr std::string_view kDash = "-";
constexpr std::string_view kRange = "\xE2\x80\x93";  // en dash

const std::pair<std::string_view, std::string_view> kRegimeColumns[] = {{"full", "Full"},
                                                                         {"sampled", "Sample"}};

std::string fixed(const MaybeReal& v, int decimals) {
  return v ? format_fixed(*v, decimals) : std::string(kUndefined);
}

std::string signed_fixed(const MaybeReal& v, int decimals) {
  if (!v) return std::string(kUndefined);
  const std::string text = format_fixed(*v, decimals);
  return *v >= 0 ? "+" + text : text;
}

std::string significant(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string with_ci(const MaybeReal& v, const MetricReport& m, const std::string& name) {
  std::string out = fixed(v, 3);
  if (const auto it = m.ci.find(name); v && it != m.ci.end()) {
    out += " [" + format_fixed(it->second.low, 3) + ", " + format_fixed(it->second.high, 3) + "]";
  }
  return out;
}

std::string capitalized(std::string_view name) {
  std::string out(name);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

bool is_dummy_result(const ExperimentResult& r) { return r.model && is_dummy(r.model->family); }

std::vector<const ExperimentResult*> select(std::span<const ExperimentResult> results,
                                            std::string_view dataset, std::string_view regime) {
  std::vector<const ExperimentResult*> out;
  for (const ExperimentResult& r : results) {
    if (r.key.dataset == dataset && (regime.empty() || r.key.regime == regime)) out.push_back(&r);
  }
  std::stable_sort(out.begin(), out.end(), [](const ExperimentResult* a, const ExperimentResult* b) {
    return std::tie(a->kind, a->ordinal) < std::tie(b->kind, b->ordinal);
  });
  return out;
}

MaybeReal mean_defined(const std::vector<MaybeReal>& values) {
  std::vector<double> v;
  for (const auto& x : values) {
    if (x) v.push_back(*x);
  }
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

MaybeReal median_defined(const std::vector<MaybeReal>& values) {
  std::vector<double> v;
  for (const auto& x : values) {
    if (x) v.push_back(*x);
  }
  if (v.empty()) return std::nullopt;
  return median(std::move(v));
}

// Four metric cells of one result, or of the average over prompt cells.
std::vector<std::string> metric_cells(const ExperimentResult& r) {
  return {fixed(r.metrics.recall, 3), fixed(r.metrics.precision, 3),
          with_ci(r.metrics.f1, r.metrics, "f1"), with_ci(r.metrics.f3, r.metrics, "f3")};
}

std::vector<std::string> average_cells(const std::vector<const ExperimentResult*>& cells) {
  std::vector<MaybeReal> rec, prec;
  std::map<std::string, std::vector<MaybeReal>> point, low, high;
  for (const ExperimentResult* r : cells) {
    rec.push_back(r->metrics.recall);
    prec.push_back(r->metrics.precision);
    point["f1"].push_back(r->metrics.f1);
    point["f3"].push_back(r->metrics.f3);
    for (const char* name : {"f1", "f3"}) {
      const auto it = r->metrics.ci.find(name);
      low[name].push_back(it != r->metrics.ci.end() ? MaybeReal(it->second.low) : std::nullopt);
      high[name].push_back(it != r->metrics.ci.end() ? MaybeReal(it->second.high) : std::nullopt);
    }
  }
  std::vector<std::string> out = {fixed(mean_defined(rec), 3), fixed(mean_defined(prec), 3)};
  for (const char* name : {"f1", "f3"}) {
    std::string cell = fixed(mean_defined(point[name]), 3);
    const MaybeReal lo = mean_defined(low[name]);
    const MaybeReal hi = mean_defined(high[name]);
    if (lo && hi) cell += " [" + format_fixed(*lo, 3) + ", " + format_fixed(*hi, 3) + "]";
    out.push_back(cell);
  }
  return out;
}

std::string observation(const std::vector<std::pair<std::string, MaybeReal>>& rhos) {
  std::string out;
  for (const auto& [dataset, rho] : rhos) {
    std::string verdict = "undefined";
    if (rho) {
      // A negative correlation with rank means the factor goes with better ranks.
      verdict = *rho <= -0.3 ? "beneficial" : *rho >= 0.3 ? "harmful" : "neutral";
    }
    if (!out.empty()) out += "; ";
    out += capitalized(dataset) + ": " + verdict;
  }
  return out;
}

void add_file(std::vector<std::string>& written, const std::filesystem::path& path,
              const std::string& content) {
  write_file_atomic(path.string(), content);
  written.push_back(path.string());
}

}  // namespace

std::string to_markdown(const Table& table) {
  const auto line = [](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
  };
  std::string out = line(table.header) + "|";
  for (std::size_t i = 0; i < table.header.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& row : table.rows) out += line(row);
  return out;
}

std::string to_csv(const Table& table) {
  RawTable raw;
  raw.columns = table.header;
  for (const auto& row : table.rows) {
    std::vector<Cell> cells;
    for (const auto& c : row) cells.emplace_back(c);
    raw.rows.push_back(std::move(cells));
  }
  return write_csv(raw);
}

Table metrics_table(std::span<const ExperimentResult> results, std::string_view dataset,
                    RankMetric metric) {
  Table t;
  t.header = {"Model"};
  for (const auto& [regime, label] : kRegimeColumns) {
    for (const char* col : {"Rec.", "Prec.", "F1 (CI)", "F3 (CI)"}) {
      t.header.push_back(std::string(label) + " " + col);
    }
  }
  const auto rows_for = [&](std::string_view regime) { return select(results, dataset, regime); };
  // Row names in display order.
  std::vector<std::string> tuned, dummies;
  for (const ExperimentResult* r : select(results, dataset, "")) {
    if (r->kind != ResultKind::kBaseline) continue;
    auto& bucket = is_dummy_result(*r) ? dummies : tuned;
    if (std::find(bucket.begin(), bucket.end(), r->key.id) == bucket.end()) {
      bucket.push_back(r->key.id);
    }
  }
  const auto baseline_row = [&](const std::string& name) {
    std::vector<std::string> row = {name};
    for (const auto& [regime, label] : kRegimeColumns) {
      const ExperimentResult* hit = nullptr;
      for (const ExperimentResult* r : rows_for(regime)) {
        if (r->kind == ResultKind::kBaseline && r->key.id == name) hit = r;
      }
      const auto cells = hit ? metric_cells(*hit) : std::vector<std::string>(4, std::string(kDash));
      row.insert(row.end(), cells.begin(), cells.end());
    }
    return row;
  };
  for (const auto& name : tuned) t.rows.push_back(baseline_row(name));
  bool any_llm = false;
  std::vector<std::string> best = {"LLM (max)"}, avg = {"LLM (avg)"};
  for (const auto& [regime, label] : kRegimeColumns) {
    std::vector<const ExperimentResult*> cells;
    for (const ExperimentResult* r : rows_for(regime)) {
      if (r->kind == ResultKind::kLlm) cells.push_back(r);
    }
    if (cells.empty()) {
      best.insert(best.end(), 4, std::string(kDash));
      avg.insert(avg.end(), 4, std::string(kDash));
      continue;
    }
    any_llm = true;
    std::vector<ExperimentResult> copies;
    for (const ExperimentResult* r : cells) copies.push_back(*r);
    const Summary s = rank_and_summarize(copies, metric);
    const ExperimentResult* top = nullptr;
    for (const ExperimentResult* r : cells) {
      if (r->key == s.rows.front().key) top = r;
    }
    const auto top_cells = metric_cells(*top);
    best.insert(best.end(), top_cells.begin(), top_cells.end());
    const auto mean_cells = average_cells(cells);
    avg.insert(avg.end(), mean_cells.begin(), mean_cells.end());
  }
  if (any_llm) {
    t.rows.push_back(best);
    t.rows.push_back(avg);
  }
  for (const auto& name : dummies) t.rows.push_back(baseline_row(name));
  return t;
}

Table fairness_table(std::span<const ExperimentResult> results, std::string_view dataset,
                     std::string_view regime) {
  Table t;
  t.header = {"Model",   "Shots",    "Comm_Style", "Reasoning", "Domain_Knowledge",
              "DP_diff", "TPR_diff", "FPR_diff",   "EOD"};
  const auto gap_cells = [](const FairnessReport& f) {
    return std::vector<std::string>{fixed(f.dp_diff, 4), fixed(f.tpr_diff, 4),
                                    fixed(f.fpr_diff, 4), fixed(f.eod, 4)};
  };
  std::vector<const FairnessReport*> llm, ml;
  const auto rows = select(results, dataset, regime);
  for (const ExperimentResult* r : rows) {
    if (r->kind != ResultKind::kBaseline) continue;
    std::vector<std::string> row = {r->key.id, "-", "-", "-", "-"};
    const auto gaps = gap_cells(r->fairness);
    row.insert(row.end(), gaps.begin(), gaps.end());
    t.rows.push_back(row);
    ml.push_back(&r->fairness);
  }
  for (const ExperimentResult* r : rows) {
    if (r->kind != ResultKind::kLlm || !r->prompt) continue;
    const PromptConfig& c = *r->prompt;
    std::vector<std::string> row = {"LLM", std::to_string(c.shots),
                                    std::string(comm_style_name(c.comm_style)),
                                    std::string(reasoning_name(c.reasoning)),
                                    c.use_knowledge ? "Yes" : "No"};
    const auto gaps = gap_cells(r->fairness);
    row.insert(row.end(), gaps.begin(), gaps.end());
    t.rows.push_back(row);
    llm.push_back(&r->fairness);
  }
  const auto aggregate = [&](const std::string& label, const std::vector<const FairnessReport*>& set,
                             bool use_median) {
    std::vector<MaybeReal> dp, tpr, fpr, eod;
    for (const FairnessReport* f : set) {
      dp.push_back(f->dp_diff);
      tpr.push_back(f->tpr_diff);
      fpr.push_back(f->fpr_diff);
      eod.push_back(f->eod);
    }
    const auto agg = use_median ? median_defined : mean_defined;
    t.rows.push_back({label, "", "", "", "", fixed(agg(dp), 4), fixed(agg(tpr), 4),
                      fixed(agg(fpr), 4), fixed(agg(eod), 4)});
  };
  if (!llm.empty()) {
    aggregate("LLM mean", llm, false);
    aggregate("LLM median", llm, true);
  }
  if (!ml.empty()) {
    aggregate("ML mean", ml, false);
    aggregate("ML median", ml, true);
  }
  return t;
}

Table timing_table(std::span<const ExperimentResult> results, std::string_view dataset) {
  Table t;
  t.header = {"Family", "Phase", "Dataset", "Mean", "Median", "Min" + std::string(kRange) + "Max"};
  const auto add = [&](const char* family, const char* phase, std::string_view label,
                       const std::vector<double>& values) {
    if (values.empty()) return;
    const Spread s = spread_of(values);
    t.rows.push_back({family, phase, std::string(label), significant(s.mean),
                      significant(s.median),
                      significant(s.min) + std::string(kRange) + significant(s.max)});
  };
  for (const auto& [regime, label] : kRegimeColumns) {
    std::vector<double> v;
    for (const ExperimentResult* r : select(results, dataset, regime)) {
      if (r->kind == ResultKind::kLlm) v.push_back(r->timing.per_case_mean);
    }
    add("LLM", "Prompt exec.", label, v);
  }
  for (const auto& [regime, label] : kRegimeColumns) {
    std::vector<double> v;
    for (const ExperimentResult* r : select(results, dataset, regime)) {
      if (r->kind == ResultKind::kBaseline) v.push_back(r->timing.train_seconds.value_or(0.0));
    }
    add("Classical ML", "Training", label, v);
  }
  for (const auto& [regime, label] : kRegimeColumns) {
    std::vector<double> v;
    for (const ExperimentResult* r : select(results, dataset, regime)) {
      if (r->kind == ResultKind::kBaseline) v.push_back(r->timing.per_case_mean);
    }
    add("Classical ML", "Inference", label, v);
  }
  return t;
}

Table factor_table(const std::vector<FactorTable>& tables, bool pairwise) {
  Table t;
  t.header = {pairwise ? "Interaction" : "Aspect"};
  for (const FactorTable& f : tables) {
    const std::string name = capitalized(f.dataset);
    t.header.push_back(name + " \xCF\x81 (Rank \xE2\x86\x93)");
    t.header.push_back(name + " r (Top-10 \xE2\x86\x91)");
  }
  t.header.push_back("Observations");
  if (tables.empty()) return t;
  const auto& first = pairwise ? tables.front().pairwise : tables.front().individual;
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::vector<std::string> row = {first[i].label};
    std::vector<std::pair<std::string, MaybeReal>> rhos;
    for (const FactorTable& f : tables) {
      const FactorRow& fr = (pairwise ? f.pairwise : f.individual).at(i);
      row.push_back(signed_fixed(fr.rho_rank, 2));
      row.push_back(signed_fixed(fr.r_top10, 2));
      rhos.emplace_back(f.dataset, fr.rho_rank);
    }
    row.push_back(observation(rhos));
    t.rows.push_back(row);
  }
  return t;
}

std::string replicate_csv(std::span<const ExperimentResult> results) {
  std::string out = "dataset,regime,model,metric,replicate,value\n";
  for (const ExperimentResult& r : results) {
    const std::string prefix = r.key.dataset + "," + r.key.regime + "," + r.key.id + ",";
    for (const auto& [name, values] :
         {std::pair{"F1", &r.f1_replicates}, std::pair{"F3", &r.f3_replicates}}) {
      for (std::size_t i = 0; i < values->size(); ++i) {
        out += prefix + name + "," + std::to_string(i) + "," + format_number((*values)[i]) + "\n";
      }
    }
  }
  return out;
}

std::string results_csv(std::span<const ExperimentResult> results) {
  Table t;
  t.header = {"dataset", "regime", "id", "kind", "hash", "n", "tp", "fp", "fn", "tn", "recall",
              "precision", "f1", "f1_low", "f1_high", "f3", "f3_low", "f3_high", "dp_diff",
              "tpr_diff", "fpr_diff", "eod", "parse_failures", "request_failures",
              "train_seconds", "total_inference_seconds"};
  const auto num = [](const MaybeReal& v) { return v ? format_number(*v) : std::string(); };
  for (const ExperimentResult& r : results) {
    const MetricReport& m = r.metrics;
    const auto bound = [&](const char* name, bool high) {
      const auto it = m.ci.find(name);
      if (it == m.ci.end()) return std::string();
      return format_number(high ? it->second.high : it->second.low);
    };
    t.rows.push_back({r.key.dataset, r.key.regime, r.key.id,
                      r.kind == ResultKind::kLlm ? "llm" : "baseline", r.hash,
                      std::to_string(m.n), std::to_string(m.counts.tp),
                      std::to_string(m.counts.fp), std::to_string(m.counts.fn),
                      std::to_string(m.counts.tn), num(m.recall), num(m.precision), num(m.f1),
                      bound("f1", false), bound("f1", true), num(m.f3), bound("f3", false),
                      bound("f3", true), num(r.fairness.dp_diff), num(r.fairness.tpr_diff),
                      num(r.fairness.fpr_diff), num(r.fairness.eod),
                      std::to_string(r.parse_failures), std::to_string(r.request_failures),
                      num(r.timing.train_seconds), format_number(r.timing.total_inference_seconds)});
  }
  return to_csv(t);
}

std::string summary_csv(const Summary& summary) {
  Table t;
  t.header = {"dataset", "regime", "id", "kind", "rank", "top10", "recall", "precision", "f1", "f3"};
  const auto num = [](const MaybeReal& v) { return v ? format_number(*v) : std::string(); };
  for (const RankedRow& r : summary.rows) {
    t.rows.push_back({r.key.dataset, r.key.regime, r.key.id,
                      r.kind == ResultKind::kLlm ? "llm" : "baseline", std::to_string(r.rank),
                      r.top10 ? "1" : "0", num(r.recall), num(r.precision), num(r.f1),
                      num(r.f3)});
  }
  for (const AggregateRow& a : summary.aggregates) {
    const std::string dataset = summary.rows.empty() ? "" : summary.rows.front().key.dataset;
    const std::string regime = summary.rows.empty() ? "" : summary.rows.front().key.regime;
    t.rows.push_back({dataset, regime, a.label, "aggregate", "", "", num(a.recall),
                      num(a.precision), num(a.f1), num(a.f3)});
  }
  return to_csv(t);
}

std::string factor_json(const FactorTable& table) {
  const auto rows = [](const std::vector<FactorRow>& rs) {
    ojson arr = ojson::array();
    for (const FactorRow& r : rs) {
      arr.push_back({{"label", r.label},
                     {"rho_rank", r.rho_rank ? ojson(*r.rho_rank) : ojson(nullptr)},
                     {"r_top10", r.r_top10 ? ojson(*r.r_top10) : ojson(nullptr)}});
    }
    return arr;
  };
  ojson j;
  j["dataset"] = table.dataset;
  j["regime"] = table.regime;
  j["individual"] = rows(table.individual);
  j["pairwise"] = rows(table.pairwise);
  return j.dump(2) + "\n";
}

std::vector<std::string> emit_report(std::span<const ExperimentResult> results,
                                     const std::string& dir, RankMetric metric) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  std::vector<std::string> written;
  std::vector<std::string> datasets;
  for (const ExperimentResult& r : results) {
    if (std::find(datasets.begin(), datasets.end(), r.key.dataset) == datasets.end()) {
      datasets.push_back(r.key.dataset);
    }
  }
  for (const std::string& dataset : datasets) {
    const Table metrics = metrics_table(results, dataset, metric);
    add_file(written, root / ("metrics_" + dataset + ".md"), to_markdown(metrics));
    add_file(written, root / ("metrics_" + dataset + ".csv"), to_csv(metrics));
    const Table timing = timing_table(results, dataset);
    add_file(written, root / ("timing_" + dataset + ".md"), to_markdown(timing));
    add_file(written, root / ("timing_" + dataset + ".csv"), to_csv(timing));
    for (const auto& [regime, label] : kRegimeColumns) {
      const auto rows = select(results, dataset, regime);
      if (rows.empty()) continue;
      const std::string stem = dataset + "_" + std::string(regime);
      const Table fairness = fairness_table(results, dataset, regime);
      add_file(written, root / ("fairness_" + stem + ".md"), to_markdown(fairness));
      add_file(written, root / ("fairness_" + stem + ".csv"), to_csv(fairness));
      std::vector<ExperimentResult> copies;
      for (const ExperimentResult* r : rows) copies.push_back(*r);
      add_file(written, root / ("summary_" + stem + ".csv"),
               summary_csv(rank_and_summarize(copies, metric)));
    }
  }
  for (const auto& [regime, label] : kRegimeColumns) {
    std::vector<FactorTable> tables;
    for (const std::string& dataset : datasets) {
      std::vector<ExperimentResult> cells;
      for (const ExperimentResult* r : select(results, dataset, regime)) {
        if (r->kind == ResultKind::kLlm) cells.push_back(*r);
      }
      if (!cells.empty()) tables.push_back(analyze_factors(cells, metric));
    }
    if (tables.empty()) continue;
    const std::string stem(regime);
    const Table indiv = factor_table(tables, false);
    const Table pair = factor_table(tables, true);
    add_file(written, root / ("indiv_corr_" + stem + ".md"), to_markdown(indiv));
    add_file(written, root / ("indiv_corr_" + stem + ".csv"), to_csv(indiv));
    add_file(written, root / ("pairwise_corr_" + stem + ".md"), to_markdown(pair));
    add_file(written, root / ("pairwise_corr_" + stem + ".csv"), to_csv(pair));
  }
  add_file(written, root / "results.csv", results_csv(results));
  add_file(written, root / "bootstrap_replicates.csv", replicate_csv(results));
  return written;
}

}  // namespace clinicl
