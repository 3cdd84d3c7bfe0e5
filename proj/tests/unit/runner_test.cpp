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

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>

#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/data/descriptor_io.hpp"
#include "clinicl/gateway/mock.hpp"
#include "clinicl/runner/experiment.hpp"
#include "clinicl/runner/report.hpp"
#include "clinicl/runner/summary.hpp"
#include "fixtures.hpp"

namespace clinicl {
namespace {

namespace fs = std::filesystem;
using testing::source_path;

std::string scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() /
                       (std::string("clinicl_runner_") + info->test_suite_name() + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

ExperimentResult scored(const std::string& id, ResultKind kind, double f1, double f3 = 0.5) {
  ExperimentResult r;
  r.key = {"heart", "full", id};
  r.kind = kind;
  r.metrics.f1 = f1;
  r.metrics.f3 = f3;
  r.metrics.recall = f3;
  r.metrics.precision = f1;
  return r;
}

ExperimentResult cell_result(const PromptConfig& c, double f1) {
  ExperimentResult r = scored(c.key(), ResultKind::kLlm, f1);
  r.prompt = c;
  return r;
}

// ---------------------------------------------------------------- ranking

TEST(Rank, TwoResultsOrderedByF3) {
  const std::vector<ExperimentResult> rs = {scored("a", ResultKind::kLlm, 0.1, 0.8),
                                            scored("b", ResultKind::kLlm, 0.1, 0.9)};
  const Summary s = rank_and_summarize(rs, RankMetric::kF3);
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[0].key.id, "b");
  EXPECT_EQ(s.rows[0].rank, 1u);
  EXPECT_EQ(s.rows[1].key.id, "a");
  EXPECT_EQ(s.rows[1].rank, 2u);
}

TEST(Rank, TwentyFourResultsFlagTen) {
  std::vector<ExperimentResult> rs;
  for (int i = 0; i < 24; ++i) rs.push_back(scored("r" + std::to_string(i), ResultKind::kLlm, i / 30.0));
  const Summary s = rank_and_summarize(rs, RankMetric::kF1);
  EXPECT_EQ(std::count_if(s.rows.begin(), s.rows.end(), [](const RankedRow& r) { return r.top10; }),
            10);
  EXPECT_EQ(s.rows.front().key.id, "r23");
}

TEST(Rank, TiesKeepInputOrderAndUndefinedGoesLast) {
  std::vector<ExperimentResult> rs = {scored("x", ResultKind::kLlm, 0.5),
                                      scored("y", ResultKind::kLlm, 0.7),
                                      scored("z", ResultKind::kLlm, 0.5)};
  rs.push_back(scored("u", ResultKind::kLlm, 0.0));
  rs.back().metrics.f1.reset();
  const Summary s = rank_and_summarize(rs, RankMetric::kF1);
  std::vector<std::string> order;
  for (const auto& r : s.rows) order.push_back(r.key.id);
  EXPECT_EQ(order, (std::vector<std::string>{"y", "x", "z", "u"}));
}

TEST(Rank, AggregatesCoverPromptResultsOnly) {
  std::vector<ExperimentResult> rs = {scored("GB", ResultKind::kBaseline, 0.9, 0.99)};
  const double recalls[] = {0.2, 0.5, 0.8, 0.9};
  for (int i = 0; i < 4; ++i) rs.push_back(scored("c" + std::to_string(i), ResultKind::kLlm, 0.4, recalls[i]));
  const Summary s = rank_and_summarize(rs, RankMetric::kF1);
  ASSERT_EQ(s.aggregates.size(), 2u);
  EXPECT_EQ(s.aggregates[0].label, "LLM mean");
  EXPECT_NEAR(*s.aggregates[0].recall, (0.2 + 0.5 + 0.8 + 0.9) / 4, 1e-15);
  EXPECT_EQ(s.aggregates[1].label, "LLM median");
  EXPECT_NEAR(*s.aggregates[1].recall, (0.5 + 0.8) / 2, 1e-15);

  const std::vector<ExperimentResult> only_ml = {scored("GB", ResultKind::kBaseline, 0.9),
                                                 scored("RF", ResultKind::kBaseline, 0.8)};
  EXPECT_TRUE(rank_and_summarize(only_ml, RankMetric::kF1).aggregates.empty());
}

// ---------------------------------------------------------------- factors

std::vector<double> oracle_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (const double v : x) {
      less += v < x[i];
      equal += v == x[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

TEST(Factors, StrictlyBetterStyleGivesMinusOne) {
  PromptConfig nl, mt;
  nl.comm_style = CommStyle::kNlSt;
  mt.comm_style = CommStyle::kNcMt;
  const std::vector<ExperimentResult> rs = {cell_result(mt, 0.6), cell_result(nl, 0.8)};
  const FactorTable t = analyze_factors(rs, RankMetric::kF1);
  ASSERT_TRUE(t.individual[0].rho_rank);
  EXPECT_DOUBLE_EQ(*t.individual[0].rho_rank, -1.0);
  EXPECT_EQ(t.individual[0].label, "NL-ST style");
}

TEST(Factors, ConstantFactorIsUndefined) {
  GridConfig grid;
  grid.use_knowledge = {false};
  std::vector<ExperimentResult> rs;
  double v = 0.3;
  for (const auto& c : enumerate_grid(grid)) rs.push_back(cell_result(c, v += 0.05));
  const FactorTable t = analyze_factors(rs, RankMetric::kF1);
  EXPECT_FALSE(t.individual[3].rho_rank.has_value());
  EXPECT_FALSE(t.individual[3].r_top10.has_value());
  EXPECT_TRUE(t.individual[0].rho_rank.has_value());
}

TEST(Factors, MatchesBruteForceOracleOnPlantedGrid) {
  const auto cells = enumerate_grid(GridConfig{});
  Rng rng(99);
  std::vector<ExperimentResult> rs;
  std::vector<double> f1s;
  for (const auto& c : cells) {
    const double f1 = 0.5 + 0.2 * encode_factor(c, Factor::kStyle) +
                      0.005 * encode_factor(c, Factor::kShots) + 0.05 * rng.uniform();
    rs.push_back(cell_result(c, f1));
    f1s.push_back(f1);
  }
  const FactorTable t = analyze_factors(rs, RankMetric::kF1);
  // Oracle rank: 1 + number of strictly better cells (no ties here).
  std::vector<double> rank(f1s.size());
  std::vector<int> top(f1s.size());
  for (std::size_t i = 0; i < f1s.size(); ++i) {
    rank[i] = 1 + static_cast<double>(std::count_if(f1s.begin(), f1s.end(),
                                                    [&](double v) { return v > f1s[i]; }));
    top[i] = rank[i] <= 10;
  }
  const Factor factors[] = {Factor::kStyle, Factor::kShots, Factor::kCot, Factor::kKnowledge};
  const auto check = [&](const FactorRow& row, const std::vector<double>& x) {
    const double rho = oracle_pearson(oracle_ranks(x), oracle_ranks(rank));
    ASSERT_TRUE(row.rho_rank) << row.label;
    EXPECT_NEAR(*row.rho_rank, rho, 1e-12) << row.label;
    double m1 = 0, m0 = 0, n1 = 0, n0 = 0, mean = 0, ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      (top[i] ? m1 : m0) += x[i];
      (top[i] ? n1 : n0) += 1;
      mean += x[i];
    }
    mean /= static_cast<double>(x.size());
    for (const double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.size()));
    const double p = n1 / static_cast<double>(x.size());
    const double r = (m1 / n1 - m0 / n0) / sd * std::sqrt(p * (1 - p));
    ASSERT_TRUE(row.r_top10) << row.label;
    EXPECT_NEAR(*row.r_top10, r, 1e-12) << row.label;
  };
  std::vector<std::vector<double>> enc;
  for (std::size_t f = 0; f < 4; ++f) {
    std::vector<double> x;
    for (const auto& c : cells) x.push_back(encode_factor(c, factors[f]));
    check(t.individual[f], x);
    enc.push_back(x);
  }
  std::size_t k = 0;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b, ++k) {
      std::vector<double> x(cells.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = enc[a][i] * enc[b][i];
      check(t.pairwise[k], x);
    }
  }
  EXPECT_EQ(t.pairwise[0].label, "style × shots");
  EXPECT_EQ(t.pairwise[5].label, "cot × knowledge");
  EXPECT_LT(*t.individual[0].rho_rank, -0.5);
}

TEST(Factors, RejectsResultsWithoutPrompt) {
  const std::vector<ExperimentResult> rs = {scored("GB", ResultKind::kBaseline, 0.9),
                                            scored("RF", ResultKind::kBaseline, 0.8)};
  try {
    analyze_factors(rs, RankMetric::kF1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

// ------------------------------------------------------------ persistence

ExperimentResult random_result(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  ExperimentResult r;
  r.key = {"heart", "full", "k16-NL_ST-CoT-K1"};
  r.kind = ResultKind::kLlm;
  PromptConfig c;
  c.shots = 16;
  c.reasoning = Reasoning::kCot;
  c.use_knowledge = true;
  c.seed = 123456789012345ULL;
  r.prompt = c;
  r.hash = "0123456789abcdef";
  r.scoring = {{"0", "1"}, 1, 200, 77};
  for (std::size_t i = 0; i < n; ++i) {
    CaseRecord cr;
    cr.case_id = i * 3;
    cr.label = rng.bernoulli(0.5);
    cr.group = rng.bernoulli(0.6);
    cr.prediction = rng.bernoulli(0.7) ? cr.label : 1 - cr.label;
    cr.provenance = "JsonDelimiter";
    if (i % 17 == 0) {
      cr.prediction.reset();
      cr.provenance = std::string(kParseFailureProvenance);
    }
    cr.latency_seconds = 0.1 + rng.uniform();
    cr.attempts = 1;
    cr.raw_text = "line one\n{\"risk\": " + std::to_string(cr.prediction.value_or(1)) + "}";
    r.per_case.push_back(cr);
  }
  score_result(r);
  return r;
}

TEST(Results, RoundTripIsByteStableAndRecomputable) {
  const ExperimentResult r = random_result(5, 120);
  const std::string text = serialize_result(r);
  const ExperimentResult back = deserialize_result(text);
  EXPECT_EQ(serialize_result(back), text);
  EXPECT_EQ(back.per_case, r.per_case);
  EXPECT_NEAR(*back.metrics.f1, *r.metrics.f1, 1e-12);
  EXPECT_NEAR(back.metrics.ci.at("f3").low, r.metrics.ci.at("f3").low, 1e-12);
  EXPECT_EQ(back.f1_replicates, r.f1_replicates);
  EXPECT_EQ(back.prompt->key(), "k16-NL_ST-CoT-K1");
  EXPECT_EQ(back.prompt->seed, 123456789012345ULL);
}

TEST(Results, ExcludedCasesLeaveEveryMetric) {
  ExperimentResult r = random_result(6, 60);
  std::vector<int> preds, labels;
  for (const auto& c : r.per_case) {
    if (!c.prediction) continue;
    preds.push_back(*c.prediction);
    labels.push_back(c.label);
  }
  EXPECT_EQ(r.metrics.n, preds.size());
  EXPECT_EQ(r.metrics.counts, confusion(preds, labels));
  EXPECT_EQ(r.parse_failures, 4u);  // cases 0, 17, 34, 51
}

TEST(Results, MalformedFileIsConfigError) {
  try {
    deserialize_result("{\"type\": \"case\"}\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

// ----------------------------------------------------------------- report

std::vector<ExperimentResult> report_fixture() {
  std::vector<ExperimentResult> rs;
  std::size_t ordinal = 0;
  for (const std::string regime : {"full", "sampled"}) {
    for (const char* name : {"GB", "RF", "Stratified"}) {
      ExperimentResult r = random_result(ordinal + 11, 40);
      r.key = {"heart", regime, name};
      r.kind = ResultKind::kBaseline;
      r.prompt.reset();
      r.model = ModelSpec{std::string(name) == "Stratified" ? Family::kDummyStratified
                                                            : Family::kGradientBoosting,
                          {}, 1, name};
      r.ordinal = ordinal++ % 3;
      r.timing.train_seconds = 0.5;
      rs.push_back(r);
    }
    std::size_t k = 0;
    for (const auto& c : enumerate_grid(GridConfig{})) {
      ExperimentResult r = random_result(100 + k, 40);
      r.key = {"heart", regime, c.key()};
      r.prompt = c;
      r.ordinal = k++;
      rs.push_back(r);
    }
  }
  return rs;
}

TEST(Report, HeaderGoldens) {
  const auto rs = report_fixture();
  const std::string golden =
      "| Model | Full Rec. | Full Prec. | Full F1 (CI) | Full F3 (CI) | Sample Rec. | "
      "Sample Prec. | Sample F1 (CI) | Sample F3 (CI) |\n|---|---|---|---|---|---|---|---|---|\n";
  EXPECT_EQ(to_markdown(metrics_table(rs, "heart", RankMetric::kF1)).substr(0, golden.size()),
            golden);
  EXPECT_EQ(fairness_table(rs, "heart", "full").header,
            (std::vector<std::string>{"Model", "Shots", "Comm_Style", "Reasoning",
                                      "Domain_Knowledge", "DP_diff", "TPR_diff", "FPR_diff",
                                      "EOD"}));
  EXPECT_EQ(timing_table(rs, "heart").header,
            (std::vector<std::string>{"Family", "Phase", "Dataset", "Mean", "Median",
                                      "Min–Max"}));
  const std::vector<FactorTable> ft = {analyze_factors(
      std::vector<ExperimentResult>(rs.begin() + 3, rs.begin() + 19), RankMetric::kF1)};
  EXPECT_EQ(factor_table(ft, false).header,
            (std::vector<std::string>{"Aspect", "Heart ρ (Rank ↓)", "Heart r (Top-10 ↑)",
                                      "Observations"}));
  EXPECT_EQ(factor_table(ft, true).header.front(), "Interaction");
}

TEST(Report, MetricsRowsAndAverages) {
  const auto rs = report_fixture();
  const Table t = metrics_table(rs, "heart", RankMetric::kF1);
  std::vector<std::string> names;
  for (const auto& row : t.rows) names.push_back(row[0]);
  EXPECT_EQ(names, (std::vector<std::string>{"GB", "RF", "LLM (max)", "LLM (avg)", "Stratified"}));
  double recall = 0;
  for (std::size_t i = 3; i < 19; ++i) recall += *rs[i].metrics.recall;
  EXPECT_EQ(t.rows[3][1], format_fixed(recall / 16, 3));
}

TEST(Report, FairnessAggregateRows) {
  const auto rs = report_fixture();
  const Table t = fairness_table(rs, "heart", "full");
  ASSERT_EQ(t.rows.size(), 3u + 16u + 4u);
  EXPECT_EQ(t.rows[19][0], "LLM mean");
  EXPECT_EQ(t.rows[20][0], "LLM median");
  EXPECT_EQ(t.rows[21][0], "ML mean");
  EXPECT_EQ(t.rows[22][0], "ML median");
  EXPECT_EQ(t.rows[0][1], "-");
  double eod = 0;
  for (std::size_t i = 0; i < 3; ++i) eod += *rs[i].fairness.eod;
  EXPECT_EQ(t.rows[21][8], format_fixed(eod / 3, 4));
}

TEST(Report, EmptyGridHasNoPromptRows) {
  auto rs = report_fixture();
  rs.erase(std::remove_if(rs.begin(), rs.end(),
                          [](const ExperimentResult& r) { return r.kind == ResultKind::kLlm; }),
           rs.end());
  const Table m = metrics_table(rs, "heart", RankMetric::kF1);
  for (const auto& row : m.rows) EXPECT_EQ(row[0].find("LLM"), std::string::npos);
  const Table f = fairness_table(rs, "heart", "full");
  EXPECT_EQ(f.rows.size(), 3u + 2u);
  EXPECT_EQ(f.rows[3][0], "ML mean");
  for (const auto& row : timing_table(rs, "heart").rows) EXPECT_NE(row[0], "LLM");
  const auto files = emit_report(rs, scratch_dir(), RankMetric::kF1);
  for (const auto& path : files) EXPECT_EQ(path.find("corr"), std::string::npos);
}

TEST(Report, ReplicateCsvIsLongFormat) {
  const auto rs = report_fixture();
  const std::string csv = replicate_csv(std::vector<ExperimentResult>(rs.begin(), rs.begin() + 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,regime,model,metric,replicate,value");
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(lines),
            1 + rs[0].f1_replicates.size() + rs[0].f3_replicates.size());
}

// ----------------------------------------------------------------- config

TEST(Config, ParsesAndValidates) {
  const std::string base = source_path("configs");
  const ExperimentConfig c = load_experiment_config(base + "/experiment_heart.json");
  EXPECT_EQ(c.descriptor.name, "heart");
  EXPECT_EQ(c.regimes.size(), 2u);
  EXPECT_EQ(c.seeds.get("split"), 42u);
  EXPECT_EQ(c.seeds.get("shots"), derive_seed(c.seeds.master, "shots"));
  EXPECT_EQ(enumerate_grid(*c.grid).size(), 16u);
  EXPECT_NO_THROW(c.validate());

  const auto expect_config_error = [&](const std::string& text) {
    try {
      parse_experiment_config(text, base);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfigError) << text;
    }
  };
  expect_config_error(R"({"dataset": "heart.json", "colour": 1})");
  expect_config_error(R"({"dataset": "heart.json", "gateway": {"api_key": "x"}})");
  expect_config_error(R"({"dataset": "heart.json", "regimes": ["weekly"]})");
  expect_config_error(R"({"dataset": "heart.json", "rank_metric": "AUC"})");
  expect_config_error(R"({"dataset": 3})");

  ExperimentConfig bad = c;
  bad.regimes.clear();
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.baseline_families.clear();
  bad.grid.reset();
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.knowledge_source_models = {"Random"};
  EXPECT_THROW(bad.validate(), Error);
}

// ------------------------------------------------------------ end to end

ExperimentConfig small_heart(const std::string& out) {
  ExperimentConfig c;
  c.descriptor_path = source_path("configs/heart.json");
  c.descriptor = load_descriptor(c.descriptor_path);
  c.regimes = {Regime::kFull};
  c.baseline_families = {"LogReg", "Stratified"};
  c.search_draws = 2;
  c.seeds.master = 7;
  c.seeds.pinned = {{"split", 42}};
  c.bootstrap_replicates = 100;
  // "1 iff age > 50".
  c.mock = MockConfig{{{"age", 1.0}}, -50.0, 0.0005};
  c.use_mock = true;
  c.output_dir = out;
  return c;
}

class ScriptedBackend : public Backend {
 public:
  using FailFn = std::function<bool(std::span<const Message>)>;
  ScriptedBackend(std::unique_ptr<Backend> inner, std::atomic<int>* calls, FailFn fail = {})
      : inner_(std::move(inner)), calls_(calls), fail_(std::move(fail)) {}
  AttemptOutcome send(std::span<const Message> messages, const GatewayConfig& config) override {
    ++*calls_;
    if (fail_ && fail_(messages)) {
      AttemptOutcome out;
      out.status = 503;
      out.error = "scripted outage";
      out.simulated_seconds = 0.0;
      return out;
    }
    return inner_->send(messages, config);
  }

 private:
  std::unique_ptr<Backend> inner_;
  std::atomic<int>* calls_;
  FailFn fail_;
};

std::unique_ptr<Backend> mock_for(const ExperimentConfig& c) {
  return make_mock_backend(
      MockSpec{c.descriptor.feature_specs, c.mock->weights, c.mock->bias, c.mock->seconds_per_token});
}

TEST(EndToEnd, DefaultGridCoversEveryCaseAndMatchesRule) {
  const ExperimentConfig config = small_heart(scratch_dir());
  const BaselineRun base = run_baselines(config, Regime::kFull);
  ASSERT_EQ(base.results.size(), 2u);
  EXPECT_EQ(base.results[1].timing.train_seconds.value(), 0.0);
  ASSERT_TRUE(base.tiers);
  EXPECT_EQ(base.tiers->source_models, std::vector<std::string>{"LogReg"});
  const auto gateway = make_gateway(config);
  const GridRun run = run_llm_grid(config, Regime::kFull, *gateway, base.tiers);
  ASSERT_EQ(run.results.size(), 16u);
  EXPECT_TRUE(run.failures.empty());

  const PreparedData data = prepare_data(config, Regime::kFull);
  ASSERT_EQ(data.test.size(), 92u);
  std::size_t agree = 0;
  const std::size_t age = 0;
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    const int rule = *parse_number(data.test.display_value(i, age)) > 50 ? 1 : 0;
    agree += rule == data.test.labels[i];
  }
  std::size_t records = 0;
  for (const ExperimentResult& r : run.results) {
    records += r.per_case.size();
    EXPECT_EQ(r.parse_failures, 0u);
    const auto& c = r.metrics.counts;
    EXPECT_EQ(static_cast<std::size_t>(c.tp + c.tn), agree) << r.key.id;
  }
  EXPECT_EQ(records, 16u * 92u);
  EXPECT_EQ(exit_code_for({run}), kExitOk);
}

TEST(EndToEnd, ResumeMatchesUninterruptedRun) {
  const std::string dir = scratch_dir();
  ExperimentConfig a = small_heart(dir + "/a");
  ExperimentConfig b = small_heart(dir + "/b");
  const auto tiers_a = run_baselines(a, Regime::kFull).tiers;
  const auto tiers_b = run_baselines(b, Regime::kFull).tiers;
  run_llm_grid(a, Regime::kFull, *make_gateway(a), tiers_a);
  const GridRun first = run_llm_grid(b, Regime::kFull, *make_gateway(b), tiers_b);
  // Simulate an interruption that lost the last five cells.
  for (std::size_t k = 11; k < 16; ++k) fs::remove(result_path(b.output_dir, first.results[k].key));
  const GridRun resumed = run_llm_grid(b, Regime::kFull, *make_gateway(b), tiers_b);
  EXPECT_EQ(resumed.reused, 11u);
  for (const ExperimentResult& r : resumed.results) {
    EXPECT_EQ(read_file(result_path(a.output_dir, r.key)), read_file(result_path(b.output_dir, r.key)))
        << r.key.id;
  }
  // A changed seed invalidates every cell.
  b.seeds.master = 8;
  const auto tiers_c = run_baselines(b, Regime::kFull).tiers;
  EXPECT_EQ(run_llm_grid(b, Regime::kFull, *make_gateway(b), tiers_c).reused, 0u);
}

TEST(EndToEnd, ReplayCacheAvoidsBackendCalls) {
  const std::string dir = scratch_dir();
  ExperimentConfig config = small_heart(dir);
  config.grid = GridConfig{{0}, {CommStyle::kNlSt}, {Reasoning::kDirect, Reasoning::kCot}, {false}};
  config.gateway.replay_path = dir + "/replay.jsonl";
  std::atomic<int> calls{0};
  {
    Gateway gw(config.gateway, std::make_unique<ScriptedBackend>(mock_for(config), &calls));
    EXPECT_EQ(run_llm_grid(config, Regime::kFull, gw, std::nullopt).results.size(), 2u);
  }
  EXPECT_EQ(calls.load(), 2 * 92);
  fs::remove_all(dir + "/results");
  calls = 0;
  Gateway gw(config.gateway, std::make_unique<ScriptedBackend>(mock_for(config), &calls));
  EXPECT_EQ(run_llm_grid(config, Regime::kFull, gw, std::nullopt).results.size(), 2u);
  EXPECT_EQ(calls.load(), 0);
}

TEST(EndToEnd, FailureCeilingAndExitCodes) {
  const std::string dir = scratch_dir();
  ExperimentConfig config = small_heart(dir);
  config.grid = GridConfig{{0}, {CommStyle::kNlSt}, {Reasoning::kDirect}, {false}};
  config.gateway.max_retries = 1;
  config.gateway.base_backoff_ms = 0;
  // Requests whose last message hashes to a leading '0' or '1' always fail.
  const auto fail = [](std::span<const Message> m) {
    const char c = sha256_hex(m.back().content)[0];
    return c == '0' || c == '1';
  };
  std::atomic<int> calls{0};
  config.failure_ceiling = 0.5;
  Gateway tolerant(config.gateway, std::make_unique<ScriptedBackend>(mock_for(config), &calls, fail));
  const GridRun partial = run_llm_grid(config, Regime::kFull, tolerant, std::nullopt);
  ASSERT_EQ(partial.results.size(), 1u);
  const std::size_t failed = partial.results[0].request_failures;
  ASSERT_GT(failed, 0u);
  ASSERT_LT(failed, 46u);
  EXPECT_EQ(partial.results[0].per_case.size(), 92u);
  EXPECT_EQ(exit_code_for({partial}), kExitPartial);

  fs::remove_all(dir + "/results");
  config.failure_ceiling = 0.0;
  Gateway strict(config.gateway, std::make_unique<ScriptedBackend>(mock_for(config), &calls, fail));
  const GridRun aborted = run_llm_grid(config, Regime::kFull, strict, std::nullopt);
  EXPECT_TRUE(aborted.results.empty());
  ASSERT_EQ(aborted.failures.size(), 1u);
  EXPECT_TRUE(aborted.failures[0].exhausted);
  EXPECT_EQ(aborted.failures[0].failed_cases, failed);
  EXPECT_EQ(exit_code_for({aborted}), kExitExhausted);
  write_manifest(dir, {aborted});
  EXPECT_NE(read_file(dir + "/manifest.json").find("k0-NL_ST-Direct-K0"), std::string::npos);
  EXPECT_FALSE(fs::exists(result_path(dir, aborted.failures[0].key)));
}

TEST(EndToEnd, KnowledgeCellsNeedTiers) {
  const ExperimentConfig config = small_heart(scratch_dir());
  try {
    run_llm_grid(config, Regime::kFull, *make_gateway(config), std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST(Data, RegimesShareTheTestSplit) {
  ExperimentConfig config = small_heart(scratch_dir());
  const PreparedData full = prepare_data(config, Regime::kFull);
  const PreparedData sampled = prepare_data(config, Regime::kSampled);
  EXPECT_EQ(full.test.source_rows, sampled.test.source_rows);
  EXPECT_EQ(sampled.train.size(), (full.train.size() + 1) / 2);
  EXPECT_NEAR(static_cast<double>(sampled.train.count_label(1)),
              full.train.count_label(1) * 0.5, 1.0);
}

}  // namespace
}  // namespace clinicl
