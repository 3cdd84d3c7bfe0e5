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

#include "clinicl/baselines/persistence.hpp"

#include "clinicl/common/error.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using nlohmann::json;

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes()) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  }
  return nodes;
}

Tree tree_from_json(const json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                             n.at(3).get<int>(), n.at(4).get<double>()});
  }
  return Tree(std::move(nodes));
}

json trees_to_json(const std::vector<Tree>& trees) {
  json out = json::array();
  for (const Tree& t : trees) out.push_back(tree_to_json(t));
  return out;
}

std::vector<Tree> trees_from_json(const json& j) {
  std::vector<Tree> out;
  for (const auto& t : j) out.push_back(tree_from_json(t));
  return out;
}

}  // namespace

std::string save_model(const TrainedModel& model) {
  json j;
  j["format"] = "clinicl-model";
  j["version"] = kModelFormatVersion;
  j["spec"] = {{"family", std::string(family_name(model.spec.family))},
               {"name", model.spec.name},
               {"seed", model.spec.seed},
               {"hyperparams", model.spec.hyperparams}};
  j["feature_importance"] = model.feature_importance;
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  json state;
  if (const auto* lin = std::get_if<LinearParams>(&model.state)) {
    state = {{"kind", "linear"},         {"weights", lin->weights},
             {"bias", lin->bias},        {"mean", lin->mean},
             {"scale", lin->scale},      {"std_weights", lin->std_weights},
             {"std_bias", lin->std_bias}};
  } else if (const auto* forest = std::get_if<ForestParams>(&model.state)) {
    state = {{"kind", "forest"}, {"trees", trees_to_json(forest->trees)}};
  } else if (const auto* boost = std::get_if<BoostParams>(&model.state)) {
    state = {{"kind", "boost"},
             {"init", boost->init},
             {"learning_rate", boost->learning_rate},
             {"trees", trees_to_json(boost->trees)}};
  } else {
    state = {{"kind", "dummy"}, {"prior", std::get<DummyParams>(model.state).prior}};
  }
  j["state"] = std::move(state);
  return j.dump();
}

TrainedModel load_model(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "clinicl-model") {
      throw Error(ErrorCode::kConfigError, "not a model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::kConfigError, "unsupported model format version");
    }
    TrainedModel m;
    const json& spec = j.at("spec");
    m.spec.family = parse_family(spec.at("family").get<std::string>());
    m.spec.name = spec.at("name").get<std::string>();
    m.spec.seed = spec.at("seed").get<std::uint64_t>();
    m.spec.hyperparams = spec.at("hyperparams").get<HyperParams>();
    m.feature_importance = j.at("feature_importance").get<std::vector<double>>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<std::size_t>();
    const json& s = j.at("state");
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "linear") {
      LinearParams lp;
      lp.weights = s.at("weights").get<std::vector<double>>();
      lp.bias = s.at("bias").get<double>();
      lp.mean = s.at("mean").get<std::vector<double>>();
      lp.scale = s.at("scale").get<std::vector<double>>();
      lp.std_weights = s.at("std_weights").get<std::vector<double>>();
      lp.std_bias = s.at("std_bias").get<double>();
      m.state = std::move(lp);
    } else if (kind == "forest") {
      m.state = ForestParams{trees_from_json(s.at("trees"))};
    } else if (kind == "boost") {
      BoostParams bp;
      bp.init = s.at("init").get<double>();
      bp.learning_rate = s.at("learning_rate").get<double>();
      bp.trees = trees_from_json(s.at("trees"));
      m.state = std::move(bp);
    } else if (kind == "dummy") {
      m.state = DummyParams{s.at("prior").get<double>()};
    } else {
      throw Error(ErrorCode::kConfigError, "unknown model state kind " + kind);
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed model file: ") + e.what());
  }
}

}  // namespace clinicl
