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

#include "clinicl/runner/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "clinicl/baselines/persistence.hpp"
#include "clinicl/baselines/search.hpp"
#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/data/descriptor_io.hpp"
#include "clinicl/gateway/mock.hpp"
#include "clinicl/parser/parser.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void say(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

bool is_dummy_row(const std::string& name) { return name == "Stratified" || name == "Random"; }

std::string data_digest(const ExperimentConfig& config) {
  return sha256_hex(read_file(config.descriptor_path) + "\n" +
                    read_file(config.descriptor.csv_path));
}

// Inputs shared by every result of a regime.
ojson common_inputs(const ExperimentConfig& config, Regime regime) {
  ojson j;
  j["dataset"] = config.descriptor.name;
  j["data"] = data_digest(config);
  j["regime"] = regime_name(regime);
  j["test_fraction"] = config.test_fraction;
  j["split_seed"] = config.seeds.get("split");
  if (regime == Regime::kSampled) {
    j["sample_fraction"] = config.sample_fraction;
    j["sample_seed"] = config.seeds.get("sample");
  }
  j["replicates"] = config.bootstrap_replicates;
  j["bootstrap_seed"] = config.seeds.get("bootstrap");
  return j;
}

ScoringSetup scoring_for(const ExperimentConfig& config, const LabeledDataset& test) {
  ScoringSetup s;
  s.group_names = test.group_names;
  s.reference_group = test.reference_group;
  s.replicates = config.bootstrap_replicates;
  s.bootstrap_seed = config.seeds.get("bootstrap");
  return s;
}

std::optional<ExperimentResult> reusable(const std::string& path, const std::string& hash) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    ExperimentResult r = deserialize_result(read_file(path));
    if (r.hash == hash) return r;
  } catch (const Error&) {
    // A damaged file is recomputed.
  }
  return std::nullopt;
}

void ensure_parent(const std::string& path) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
}

void persist(const std::string& output_dir, const ExperimentResult& result) {
  const std::string path = result_path(output_dir, result.key);
  ensure_parent(path);
  write_file_atomic(path, serialize_result(result));
}

std::string model_path(const std::string& output_dir, Regime regime, const std::string& name) {
  return (std::filesystem::path(output_dir) / "models" / std::string(regime_name(regime)) /
          (name + ".json"))
      .string();
}

struct FittedBaseline {
  TrainedModel model;
  double train_seconds = 0.0;
  std::vector<int> predictions;
  std::vector<double> latencies;
};

FittedBaseline fit_baseline(const ExperimentConfig& config, const std::string& name,
                            const PreparedData& data) {
  FittedBaseline out;
  const std::uint64_t seed = derive_seed(config.seeds.get("search"), name);
  const auto start = Clock::now();
  if (is_dummy_row(name)) {
    const Family family = name == "Stratified" ? Family::kDummyStratified : Family::kDummyRandom;
    out.model = train(ModelSpec{family, {}, seed, name}, data.train);
  } else {
    const BaselineDef def = baseline_by_name(name);
    SearchOptions options;
    options.folds = config.search_folds;
    options.max_draws = config.search_draws;
    options.seed = seed;
    const SearchResult search =
        random_search(def.family, def.name, def.grid, data.train.rows, data.train.labels, options);
    out.model = train(search.best_spec, data.train);
    out.train_seconds = seconds_since(start);
  }
  const std::size_t n = data.test.size();
  if (is_dummy(out.model.spec.family)) {
    const auto t0 = Clock::now();
    out.predictions = predict_all(out.model, data.test.rows);
    out.latencies.assign(n, n ? seconds_since(t0) / static_cast<double>(n) : 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto t0 = Clock::now();
      out.predictions.push_back(predict(out.model, data.test.rows.row(i)));
      out.latencies.push_back(seconds_since(t0));
    }
  }
  return out;
}

std::string baseline_hash(const ExperimentConfig& config, Regime regime, const std::string& name) {
  ojson j = common_inputs(config, regime);
  j["baseline"] = name;
  if (!is_dummy_row(name)) {
    const BaselineDef def = baseline_by_name(name);
    j["family"] = family_name(def.family);
    ojson axes = ojson::array();
    for (const auto& [axis, values] : def.grid.axes) axes.push_back({axis, values});
    j["grid"] = axes;
    j["draws"] = config.search_draws;
    j["folds"] = config.search_folds;
  }
  j["search_seed"] = derive_seed(config.seeds.get("search"), name);
  return experiment_hash(j.dump());
}

std::optional<int> policy_prediction(FailurePolicy policy) {
  switch (policy) {
    case FailurePolicy::kPositive:
      return 1;
    case FailurePolicy::kNegative:
      return 0;
    case FailurePolicy::kExclude:
      break;
  }
  return std::nullopt;
}

MockSpec mock_spec_for(const ExperimentConfig& config) {
  MockSpec spec;
  spec.specs = config.descriptor.feature_specs;
  spec.weights = config.mock->weights;
  spec.bias = config.mock->bias;
  spec.seconds_per_token = config.mock->seconds_per_token;
  return spec;
}

ojson backend_identity(const ExperimentConfig& config) {
  if (config.use_mock) {
    return {{"mock", {{"weights", ojson(config.mock->weights)},
                      {"bias", config.mock->bias},
                      {"seconds_per_token", config.mock->seconds_per_token}}}};
  }
  const GatewayConfig& g = config.gateway;
  return {{"endpoint", g.endpoint_url},
          {"model", g.model_name},
          {"temperature", g.temperature},
          {"max_tokens", g.max_tokens},
          {"live_multiturn", g.live_multiturn}};
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& config, Regime regime) {
  const LabeledDataset ds = preprocess(load_csv(config.descriptor), config.descriptor);
  Split split = stratified_split(ds, config.test_fraction, config.seeds.get("split"));
  PreparedData out;
  out.regime = regime;
  out.train = regime == Regime::kSampled
                  ? subsample(split.train, config.sample_fraction, config.seeds.get("sample"))
                  : std::move(split.train);
  out.test = std::move(split.test);
  reimpute_from_train(out.train, out.test);
  return out;
}

std::string ingest_report(const ExperimentConfig& config) {
  const RawTable raw = load_csv(config.descriptor);
  const LabeledDataset ds = preprocess(raw, config.descriptor);
  ojson j;
  j["dataset"] = config.descriptor.name;
  j["raw_rows"] = raw.size();
  j["kept_rows"] = ds.size();
  j["dropped_rows"] = raw.size() - ds.size();
  j["positives"] = ds.count_label(1);
  j["negatives"] = ds.count_label(0);
  ojson groups = ojson::object();
  for (std::size_t g = 0; g < ds.group_names.size(); ++g) {
    groups[ds.group_names[g]] = std::count(ds.groups.begin(), ds.groups.end(), static_cast<int>(g));
  }
  j["groups"] = groups;
  j["reference_group"] = ds.group_names.at(static_cast<std::size_t>(ds.reference_group));
  ojson features = ojson::array();
  for (std::size_t f = 0; f < ds.num_features(); ++f) {
    std::size_t imputed = 0;
    for (std::size_t r = 0; r < ds.size(); ++r) imputed += ds.was_missing(r, f) ? 1 : 0;
    features.push_back({{"name", ds.feature_names[f]},
                        {"categories", ds.codebooks[f].size()},
                        {"imputed", imputed}});
  }
  j["features"] = features;
  ojson regimes = ojson::object();
  for (const Regime regime : config.regimes) {
    const PreparedData data = prepare_data(config, regime);
    regimes[std::string(regime_name(regime))] = {{"train", data.train.size()},
                                                 {"test", data.test.size()}};
  }
  j["regimes"] = regimes;
  return j.dump(2) + "\n";
}

KnowledgeTiers derive_tiers(const std::vector<TrainedModel>& models,
                            const std::vector<std::string>& sources,
                            const std::vector<std::string>& feature_names) {
  std::vector<std::vector<double>> phis;
  std::vector<std::string> used;
  for (const TrainedModel& m : models) {
    const bool wanted = sources.empty()
                            ? !is_dummy(m.spec.family)
                            : std::find(sources.begin(), sources.end(), m.spec.name) != sources.end();
    if (!wanted) continue;
    // A model that ignores every attribute cannot vote on importance.
    if (std::all_of(m.feature_importance.begin(), m.feature_importance.end(),
                    [](double v) { return v == 0.0; })) {
      continue;
    }
    phis.push_back(m.feature_importance);
    used.push_back(m.spec.name);
  }
  if (phis.empty()) {
    throw Error(ErrorCode::kZeroVector, "no knowledge source model has non-zero importances");
  }
  KnowledgeTiers tiers = quantile_bucket(aggregate_importances(phis), feature_names);
  tiers.source_models = used;
  return tiers;
}

std::string tiers_path(const std::string& output_dir, Regime regime) {
  return (std::filesystem::path(output_dir) / "tiers" / (std::string(regime_name(regime)) + ".json"))
      .string();
}

std::optional<KnowledgeTiers> load_tiers(const std::string& output_dir, Regime regime) {
  const std::string path = tiers_path(output_dir, regime);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return tiers_from_json(read_file(path));
}

BaselineRun run_baselines(const ExperimentConfig& config, Regime regime, const LogFn& log) {
  const PreparedData data = prepare_data(config, regime);
  const std::string regime_text(regime_name(regime));
  BaselineRun run;
  for (std::size_t b = 0; b < config.baseline_families.size(); ++b) {
    const std::string& name = config.baseline_families[b];
    const ResultKey key{config.descriptor.name, regime_text, name};
    const std::string hash = baseline_hash(config, regime, name);
    const std::string mpath = model_path(config.output_dir, regime, name);
    try {
      if (auto cached = reusable(result_path(config.output_dir, key), hash);
          cached && std::filesystem::exists(mpath)) {
        run.models.push_back(load_model(read_file(mpath)));
        run.results.push_back(std::move(*cached));
        ++run.reused;
        say(log, regime_text + "/" + name + ": reused");
        continue;
      }
      FittedBaseline fit = fit_baseline(config, name, data);
      ExperimentResult r;
      r.key = key;
      r.kind = ResultKind::kBaseline;
      r.ordinal = b;
      r.hash = hash;
      r.model = fit.model.spec;
      r.scoring = scoring_for(config, data.test);
      for (std::size_t i = 0; i < data.test.size(); ++i) {
        CaseRecord c;
        c.case_id = data.test.source_rows[i];
        c.label = data.test.labels[i];
        c.group = data.test.groups[i];
        c.prediction = fit.predictions[i];
        c.provenance = std::string(kModelProvenance);
        c.latency_seconds = fit.latencies[i];
        r.per_case.push_back(std::move(c));
      }
      r.timing.train_seconds = fit.train_seconds;
      score_result(r);
      ensure_parent(mpath);
      write_file_atomic(mpath, save_model(fit.model));
      persist(config.output_dir, r);
      say(log, regime_text + "/" + name + ": F1 " +
                   (r.metrics.f1 ? format_fixed(*r.metrics.f1, 3) : std::string("undefined")));
      run.models.push_back(std::move(fit.model));
      run.results.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(e.code(), regime_text + "/" + name + ": " + e.what(), e.detail());
    }
  }
  const bool any_source =
      std::any_of(run.models.begin(), run.models.end(),
                  [](const TrainedModel& m) { return !is_dummy(m.spec.family); });
  if (any_source && data.train.num_features() >= 3) {
    run.tiers = derive_tiers(run.models, config.knowledge_source_models, data.train.feature_names);
    const std::string path = tiers_path(config.output_dir, regime);
    ensure_parent(path);
    write_file_atomic(path, tiers_to_json(*run.tiers));
  }
  return run;
}

std::unique_ptr<Gateway> make_gateway(const ExperimentConfig& config) {
  if (config.use_mock) {
    if (!config.mock) throw Error(ErrorCode::kConfigError, "--mock needs a 'mock' section");
    return std::make_unique<Gateway>(config.gateway, make_mock_backend(mock_spec_for(config)));
  }
  return std::make_unique<Gateway>(config.gateway, make_http_backend(config.gateway));
}

GridRun run_llm_grid(const ExperimentConfig& config, Regime regime, Gateway& gateway,
                     const std::optional<KnowledgeTiers>& tiers, const LogFn& log) {
  GridRun run;
  if (!config.grid) return run;
  GridConfig grid = *config.grid;
  const std::vector<PromptConfig> cells = enumerate_grid(grid);
  const bool needs_tiers =
      std::any_of(cells.begin(), cells.end(), [](const PromptConfig& c) { return c.use_knowledge; });
  if (needs_tiers && !tiers) {
    throw Error(ErrorCode::kConfigError, "knowledge cells need tiers from the baselines");
  }
  const PreparedData data = prepare_data(config, regime);
  const std::string regime_text(regime_name(regime));
  const PromptContext context = make_context(config.descriptor, tiers);
  const std::uint64_t shots_seed = config.seeds.get("shots");
  std::vector<Record> records;
  for (std::size_t i = 0; i < data.test.size(); ++i) records.push_back(record_of(data.test, i));

  for (std::size_t k = 0; k < cells.size(); ++k) {
    PromptConfig cell = cells[k];
    cell.seed = derive_seed(shots_seed, regime_text + "/" + cell.key());
    const ResultKey key{config.descriptor.name, regime_text, cell.key()};
    ojson inputs = common_inputs(config, regime);
    inputs["cell"] = cell.key();
    inputs["token_budget"] = cell.token_budget;
    inputs["shot_seed"] = cell.seed;
    inputs["policy"] = failure_policy_name(config.failure_policy);
    inputs["backend"] = backend_identity(config);
    if (cell.use_knowledge) inputs["tiers"] = sha256_hex(tiers_to_json(*tiers));
    const std::string hash = experiment_hash(inputs.dump());
    if (auto cached = reusable(result_path(config.output_dir, key), hash)) {
      run.results.push_back(std::move(*cached));
      ++run.reused;
      say(log, regime_text + "/" + cell.key() + ": reused");
      continue;
    }

    std::vector<ChatTranscript> transcripts;
    try {
      const ShotSet shots = select_shots(data.train, cell.shots, cell.seed);
      for (const Record& record : records) {
        transcripts.push_back(build_prompt(record, shots, context, cell));
      }
    } catch (const Error& e) {
      run.failures.push_back({key, std::string(to_string(e.code())) + ": " + e.what(), 0, false});
      say(log, regime_text + "/" + cell.key() + ": failed (" + e.what() + ")");
      continue;
    }
    if (config.dump_transcripts) {
      const auto dir = std::filesystem::path(config.output_dir) / "transcripts" / regime_text /
                       cell.key();
      std::filesystem::create_directories(dir);
      for (std::size_t i = 0; i < transcripts.size(); ++i) {
        write_file_atomic((dir / (std::to_string(data.test.source_rows[i]) + ".jsonl")).string(),
                          dump_transcript(transcripts[i]));
      }
    }

    const std::vector<BatchItem> replies = gateway.complete_batch(transcripts);
    ExperimentResult r;
    r.key = key;
    r.kind = ResultKind::kLlm;
    r.ordinal = k;
    r.hash = hash;
    r.prompt = cell;
    r.scoring = scoring_for(config, data.test);
    std::size_t failed = 0;
    bool exhausted = false;
    std::string last_error;
    for (std::size_t i = 0; i < replies.size(); ++i) {
      CaseRecord c;
      c.case_id = data.test.source_rows[i];
      c.label = data.test.labels[i];
      c.group = data.test.groups[i];
      const BatchItem& item = replies[i];
      if (item.error) {
        ++failed;
        exhausted = exhausted || item.error->code() == ErrorCode::kExhaustedRetries;
        last_error = std::string(to_string(item.error->code())) + ": " + item.error->what();
        c.prediction = policy_prediction(config.failure_policy);
        c.provenance = std::string(kRequestFailureProvenance);
        c.raw_text = last_error;
      } else {
        c.latency_seconds = item.result->latency_seconds;
        c.attempts = item.result->attempts;
        c.raw_text = item.result->text;
        try {
          const Prediction p = parse_risk(item.result->text);
          c.prediction = p.label;
          c.provenance = std::string(provenance_name(p.provenance));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kParseFailure && e.code() != ErrorCode::kAmbiguousJson) throw;
          c.prediction = policy_prediction(config.failure_policy);
          c.provenance = std::string(kParseFailureProvenance);
        }
      }
      r.per_case.push_back(std::move(c));
    }
    const double ceiling = config.failure_ceiling * static_cast<double>(replies.size());
    if (static_cast<double>(failed) > ceiling) {
      run.failures.push_back({key, last_error, failed, exhausted});
      say(log, regime_text + "/" + cell.key() + ": failed, " + std::to_string(failed) +
                   " requests did not complete");
      continue;
    }
    score_result(r);
    persist(config.output_dir, r);
    say(log, regime_text + "/" + cell.key() + ": F1 " +
                 (r.metrics.f1 ? format_fixed(*r.metrics.f1, 3) : std::string("undefined")) +
                 ", parse failures " + std::to_string(r.parse_failures));
    run.results.push_back(std::move(r));
  }
  return run;
}

void write_manifest(const std::string& output_dir, const std::vector<GridRun>& runs) {
  ojson j;
  ojson done = ojson::array();
  ojson failed = ojson::array();
  for (const GridRun& run : runs) {
    for (const ExperimentResult& r : run.results) {
      done.push_back({{"regime", r.key.regime},
                      {"id", r.key.id},
                      {"hash", r.hash},
                      {"parse_failures", r.parse_failures},
                      {"request_failures", r.request_failures}});
    }
    for (const CellFailure& f : run.failures) {
      failed.push_back({{"regime", f.key.regime},
                        {"id", f.key.id},
                        {"failed_cases", f.failed_cases},
                        {"exhausted", f.exhausted},
                        {"reason", f.reason}});
    }
  }
  j["completed"] = done;
  j["failed"] = failed;
  const std::string path = (std::filesystem::path(output_dir) / "manifest.json").string();
  ensure_parent(path);
  write_file_atomic(path, j.dump(2) + "\n");
}

int exit_code_for(const std::vector<GridRun>& runs) {
  int code = kExitOk;
  for (const GridRun& run : runs) {
    for (const CellFailure& f : run.failures) {
      if (f.exhausted) return kExitExhausted;
      code = kExitPartial;
    }
    for (const ExperimentResult& r : run.results) {
      if (r.request_failures > 0) code = kExitPartial;
    }
  }
  return code;
}

}  // namespace clinicl
