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

#include "clinicl/runner/config.hpp"

#include <filesystem>
#include <set>

#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/data/descriptor_io.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "dataset",     "output_dir",   "regimes",     "test_fraction",
    "sample_fraction", "seed",     "seeds",       "baselines",
    "knowledge_source_models", "grid", "gateway", "mock",
    "bootstrap_replicates", "search", "rank_metric", "parse_failure_policy",
    "failure_ceiling", "dump_transcripts"};

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, "experiment config: " + message);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
std::vector<T> list_of(const json& node, const char* name) {
  if (!node.is_array()) fail(std::string(name) + " must be a list");
  return node.get<std::vector<T>>();
}

GridConfig parse_grid(const json& node) {
  GridConfig grid;
  for (const auto& [key, value] : node.items()) {
    if (key == "shots") {
      grid.shots = list_of<int>(value, "grid.shots");
    } else if (key == "comm_styles") {
      grid.comm_styles.clear();
      for (const auto& s : list_of<std::string>(value, "grid.comm_styles")) {
        grid.comm_styles.push_back(parse_comm_style(s));
      }
    } else if (key == "reasoning") {
      grid.reasonings.clear();
      for (const auto& s : list_of<std::string>(value, "grid.reasoning")) {
        grid.reasonings.push_back(parse_reasoning(s));
      }
    } else if (key == "use_knowledge") {
      grid.use_knowledge = list_of<bool>(value, "grid.use_knowledge");
    } else if (key == "token_budget") {
      grid.token_budget = value.get<std::size_t>();
    } else {
      fail("unknown grid field '" + key + "'");
    }
  }
  return grid;
}

GatewayConfig parse_gateway(const json& node, const std::string& base_dir) {
  GatewayConfig g;
  for (const auto& [key, value] : node.items()) {
    if (key == "endpoint_url") {
      g.endpoint_url = value.get<std::string>();
    } else if (key == "model_name") {
      g.model_name = value.get<std::string>();
    } else if (key == "temperature") {
      g.temperature = value.get<double>();
    } else if (key == "max_retries") {
      g.max_retries = value.get<int>();
    } else if (key == "base_backoff_ms") {
      g.base_backoff_ms = value.get<int>();
    } else if (key == "max_parallel") {
      g.max_parallel = value.get<int>();
    } else if (key == "timeout_ms") {
      g.timeout_ms = value.get<int>();
    } else if (key == "max_tokens") {
      g.max_tokens = value.get<int>();
    } else if (key == "api_key_env") {
      g.api_key_env = value.get<std::string>();
    } else if (key == "replay_path") {
      g.replay_path = resolve(base_dir, value.get<std::string>());
    } else if (key == "replay_only") {
      g.replay_only = value.get<bool>();
    } else if (key == "live_multiturn") {
      g.live_multiturn = value.get<bool>();
    } else if (key == "api_key") {
      fail("API keys are read from the environment variable named by api_key_env");
    } else {
      fail("unknown gateway field '" + key + "'");
    }
  }
  return g;
}

MockConfig parse_mock(const json& node) {
  MockConfig m;
  for (const auto& [key, value] : node.items()) {
    if (key == "weights") {
      m.weights = value.get<std::map<std::string, double>>();
    } else if (key == "bias") {
      m.bias = value.get<double>();
    } else if (key == "seconds_per_token") {
      m.seconds_per_token = value.get<double>();
    } else {
      fail("unknown mock field '" + key + "'");
    }
  }
  return m;
}

ExperimentConfig parse_object(const json& root, const std::string& base_dir) {
  if (!root.is_object()) fail("top level must be an object");
  for (const auto& [key, value] : root.items()) {
    if (!kTopLevelKeys.count(key)) fail("unknown field '" + key + "'");
  }
  ExperimentConfig config;
  if (!root.contains("dataset") || !root["dataset"].is_string()) {
    fail("'dataset' must name a descriptor file");
  }
  config.descriptor_path = resolve(base_dir, root["dataset"].get<std::string>());
  config.descriptor = load_descriptor(config.descriptor_path);
  if (root.contains("output_dir")) {
    config.output_dir = resolve(base_dir, root["output_dir"].get<std::string>());
  }
  if (root.contains("regimes")) {
    config.regimes.clear();
    for (const auto& r : list_of<std::string>(root["regimes"], "regimes")) {
      config.regimes.push_back(parse_regime(r));
    }
  }
  config.test_fraction = root.value("test_fraction", config.test_fraction);
  config.sample_fraction = root.value("sample_fraction", config.sample_fraction);
  config.seeds.master = root.value("seed", std::uint64_t{0});
  if (root.contains("seeds")) {
    config.seeds.pinned = root["seeds"].get<std::map<std::string, std::uint64_t>>();
  }
  if (root.contains("baselines")) {
    config.baseline_families = list_of<std::string>(root["baselines"], "baselines");
  }
  if (root.contains("knowledge_source_models")) {
    config.knowledge_source_models =
        list_of<std::string>(root["knowledge_source_models"], "knowledge_source_models");
  }
  if (root.contains("grid")) {
    if (root["grid"].is_null()) {
      config.grid.reset();
    } else {
      config.grid = parse_grid(root["grid"]);
    }
  }
  if (root.contains("gateway")) config.gateway = parse_gateway(root["gateway"], base_dir);
  if (root.contains("mock")) config.mock = parse_mock(root["mock"]);
  config.bootstrap_replicates = root.value("bootstrap_replicates", config.bootstrap_replicates);
  if (root.contains("search")) {
    const json& s = root["search"];
    config.search_draws = s.value("draws", config.search_draws);
    config.search_folds = s.value("folds", config.search_folds);
  }
  if (root.contains("rank_metric")) {
    config.rank_metric = parse_rank_metric(root["rank_metric"].get<std::string>());
  }
  if (root.contains("parse_failure_policy")) {
    config.failure_policy = parse_failure_policy(root["parse_failure_policy"].get<std::string>());
  }
  config.failure_ceiling = root.value("failure_ceiling", config.failure_ceiling);
  config.dump_transcripts = root.value("dump_transcripts", false);
  return config;
}

}  // namespace

std::string_view regime_name(Regime regime) {
  return regime == Regime::kFull ? "full" : "sampled";
}

Regime parse_regime(std::string_view name) {
  if (iequals(name, "full")) return Regime::kFull;
  if (iequals(name, "sampled") || iequals(name, "sample")) return Regime::kSampled;
  throw Error(ErrorCode::kConfigError, "unknown regime '" + std::string(name) + "'");
}

std::string_view failure_policy_name(FailurePolicy policy) {
  switch (policy) {
    case FailurePolicy::kPositive:
      return "positive";
    case FailurePolicy::kNegative:
      return "negative";
    case FailurePolicy::kExclude:
      return "exclude";
  }
  return "?";
}

FailurePolicy parse_failure_policy(std::string_view name) {
  for (const auto p : {FailurePolicy::kPositive, FailurePolicy::kNegative, FailurePolicy::kExclude}) {
    if (iequals(name, failure_policy_name(p))) return p;
  }
  throw Error(ErrorCode::kConfigError, "unknown parse-failure policy '" + std::string(name) + "'");
}

std::string_view rank_metric_name(RankMetric metric) {
  return metric == RankMetric::kF1 ? "F1" : "F3";
}

RankMetric parse_rank_metric(std::string_view name) {
  if (iequals(name, "F1")) return RankMetric::kF1;
  if (iequals(name, "F3")) return RankMetric::kF3;
  throw Error(ErrorCode::kConfigError, "ranking metric must be F1 or F3");
}

std::uint64_t SeedPlan::get(std::string_view name) const {
  const auto it = pinned.find(std::string(name));
  return it != pinned.end() ? it->second : derive_seed(master, name);
}

void ExperimentConfig::validate() const {
  if (regimes.empty()) fail("at least one regime is required");
  if (baseline_families.empty() && !grid) fail("nothing to run: no baselines and no grid");
  if (!(test_fraction > 0 && test_fraction < 1)) fail("test_fraction must lie in (0, 1)");
  if (!(sample_fraction > 0 && sample_fraction <= 1)) fail("sample_fraction must lie in (0, 1]");
  if (!(failure_ceiling >= 0 && failure_ceiling <= 1)) fail("failure_ceiling must lie in [0, 1]");
  if (search_folds < 2) fail("search.folds must be at least 2");
  if (search_draws == 0) fail("search.draws must be positive");
  std::set<std::string> seen;
  for (const auto& name : baseline_families) {
    if (!seen.insert(name).second) fail("duplicate baseline '" + name + "'");
  }
  for (const auto& name : knowledge_source_models) {
    if (!seen.count(name)) fail("knowledge source '" + name + "' is not a configured baseline");
    if (name == "Stratified" || name == "Random") fail("dummy baselines carry no importances");
  }
  if (use_mock) {
    if (!mock) fail("--mock needs a 'mock' section");
    for (const auto& [feature, weight] : mock->weights) {
      bool known = false;
      for (const auto& spec : descriptor.feature_specs) known = known || spec.name == feature;
      if (!known) fail("mock weight for unknown feature '" + feature + "'");
    }
  } else if (grid) {
    gateway.validate();
    if (gateway.endpoint_url.empty() && !gateway.replay_only) {
      fail("gateway.endpoint_url is required for live runs");
    }
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir) {
  try {
    return parse_object(json::parse(json_text), base_dir);
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return parse_experiment_config(text, std::filesystem::path(path).parent_path().string());
}

}  // namespace clinicl
