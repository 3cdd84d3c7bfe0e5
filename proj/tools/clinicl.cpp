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

// Command-line driver: ingest, baselines, grid, report and analyze.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/runner/experiment.hpp"
#include "clinicl/runner/report.hpp"
#include "clinicl/runner/summary.hpp"
#include "json.hpp"

namespace {

using namespace clinicl;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  bool mock = false;
  std::string replay;
  std::string regime;
  std::optional<int> max_parallel;
  std::string rank_metric;
  std::string failure_policy;
  bool dump_transcripts = false;
  bool quiet = false;
};

ExperimentConfig load(const Flags& flags) {
  ExperimentConfig config = load_experiment_config(flags.config);
  if (flags.seed) config.seeds.master = *flags.seed;
  if (!flags.output.empty()) config.output_dir = flags.output;
  if (flags.mock) config.use_mock = true;
  if (!flags.replay.empty()) config.gateway.replay_path = flags.replay;
  if (!flags.regime.empty()) config.regimes = {parse_regime(flags.regime)};
  if (flags.max_parallel) config.gateway.max_parallel = *flags.max_parallel;
  if (!flags.rank_metric.empty()) config.rank_metric = parse_rank_metric(flags.rank_metric);
  if (!flags.failure_policy.empty()) {
    config.failure_policy = parse_failure_policy(flags.failure_policy);
  }
  if (flags.dump_transcripts) config.dump_transcripts = true;
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  return config;
}

LogFn logger(const Flags& flags) {
  if (flags.quiet) return {};
  return [](const std::string& line) { std::cerr << "[clinicl] " << line << "\n"; };
}

int run_ingest(const Flags& flags) {
  const ExperimentConfig config = load(flags);
  const std::string report = ingest_report(config);
  write_file_atomic((std::filesystem::path(config.output_dir) / "ingest.json").string(), report);
  std::cout << report;
  return kExitOk;
}

int run_baseline_verb(const Flags& flags) {
  const ExperimentConfig config = load(flags);
  for (const Regime regime : config.regimes) run_baselines(config, regime, logger(flags));
  return kExitOk;
}

int run_grid(const Flags& flags) {
  const ExperimentConfig config = load(flags);
  if (!config.grid) {
    logger(flags)("no grid configured");
    return kExitOk;
  }
  bool needs_tiers = false;
  for (const bool k : config.grid->use_knowledge) needs_tiers = needs_tiers || k;
  const std::unique_ptr<Gateway> gateway = make_gateway(config);
  std::vector<GridRun> runs;
  for (const Regime regime : config.regimes) {
    std::optional<KnowledgeTiers> tiers = load_tiers(config.output_dir, regime);
    if (needs_tiers && !tiers) tiers = run_baselines(config, regime, logger(flags)).tiers;
    runs.push_back(run_llm_grid(config, regime, *gateway, tiers, logger(flags)));
  }
  write_manifest(config.output_dir, runs);
  return exit_code_for(runs);
}

int run_report(const Flags& flags) {
  const ExperimentConfig config = load(flags);
  const auto results = load_results(config.output_dir);
  const auto dir = (std::filesystem::path(config.output_dir) / "report").string();
  for (const std::string& path : emit_report(results, dir, config.rank_metric)) {
    std::cout << path << "\n";
  }
  return kExitOk;
}

int run_analyze(const Flags& flags) {
  const ExperimentConfig config = load(flags);
  const auto results = load_results(config.output_dir);
  const auto dir = std::filesystem::path(config.output_dir) / "analysis";
  std::filesystem::create_directories(dir);
  for (const Regime regime : config.regimes) {
    const std::string name(regime_name(regime));
    std::vector<ExperimentResult> cells, all;
    for (const ExperimentResult& r : results) {
      if (r.key.regime != name) continue;
      all.push_back(r);
      if (r.kind == ResultKind::kLlm) cells.push_back(r);
    }
    if (!cells.empty()) {
      const FactorTable table = analyze_factors(cells, config.rank_metric);
      write_file_atomic((dir / ("factors_" + name + ".json")).string(), factor_json(table));
      std::cout << to_markdown(factor_table({table}, false)) << "\n"
                << to_markdown(factor_table({table}, true)) << "\n";
    }
    if (const auto cmp = compare_best(all, config.rank_metric)) {
      nlohmann::ordered_json j;
      j["regime"] = name;
      j["llm"] = cmp->llm.id;
      j["baseline"] = cmp->baseline.id;
      j["metric"] = "F3 bootstrap replicates";
      j["u"] = cmp->test.u;
      j["z"] = cmp->test.z;
      j["p_two_sided"] = cmp->test.p_two_sided;
      write_file_atomic((dir / ("mann_whitney_" + name + ".json")).string(), j.dump(2) + "\n");
      std::cout << name << ": " << cmp->llm.id << " vs " << cmp->baseline.id
                << " U=" << format_number(cmp->test.u)
                << " p=" << format_number(cmp->test.p_two_sided) << "\n";
    }
  }
  return kExitOk;
}

bool is_config_problem(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kFileNotFound:
    case ErrorCode::kMissingColumn:
    case ErrorCode::kMalformedCsv:
    case ErrorCode::kEmptyAxis:
    case ErrorCode::kUnknownFeature:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-design and baseline experiments on tabular clinical data"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "Experiment config (JSON)")->required();
  app.add_option("--seed", flags.seed, "Master seed; pinned seeds in the config still apply");
  app.add_option("--output", flags.output, "Output directory (overrides the config)");
  app.add_flag("--mock", flags.mock, "Use the deterministic offline model");
  app.add_option("--replay", flags.replay, "Request/response replay log");
  app.add_option("--regime", flags.regime, "Run one regime only")
      ->check(CLI::IsMember({"full", "sampled"}));
  app.add_option("--max-parallel", flags.max_parallel, "Requests in flight")
      ->check(CLI::Range(1, 1024));
  app.add_option("--rank-metric", flags.rank_metric, "Ranking metric")
      ->check(CLI::IsMember({"F1", "F3"}));
  app.add_option("--parse-failure-policy", flags.failure_policy,
                 "Score unparseable replies as positive, negative or exclude them")
      ->check(CLI::IsMember({"positive", "negative", "exclude"}));
  app.add_flag("--dump-transcripts", flags.dump_transcripts, "Write every prompt transcript");
  app.add_flag("--quiet", flags.quiet, "Suppress progress lines");

  int (*verb)(const Flags&) = nullptr;
  app.add_subcommand("ingest", "Validate the descriptor and print preprocessing statistics")
      ->callback([&] { verb = run_ingest; });
  app.add_subcommand("baselines", "Tune, train and score the classical baselines")
      ->callback([&] { verb = run_baseline_verb; });
  app.add_subcommand("grid", "Run the prompt grid")->callback([&] { verb = run_grid; });
  app.add_subcommand("report", "Render tables from persisted results")
      ->callback([&] { verb = run_report; });
  app.add_subcommand("analyze", "Factor correlations and replicate comparison")
      ->callback([&] { verb = run_analyze; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    return verb(flags);
  } catch (const Error& e) {
    std::cerr << "clinicl: " << to_string(e.code()) << ": " << e.what() << "\n";
    if (is_config_problem(e.code())) return kExitConfig;
    return e.code() == ErrorCode::kExhaustedRetries ? kExitExhausted : 1;
  } catch (const std::exception& e) {
    std::cerr << "clinicl: " << e.what() << "\n";
    return 1;
  }
}
