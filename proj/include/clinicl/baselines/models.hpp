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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clinicl/baselines/tree.hpp"
#include "clinicl/common/matrix.hpp"
#include "clinicl/data/dataset.hpp"

namespace clinicl {

enum class Family {
  kLogReg,
  kRandomForest,
  kGradientBoosting,
  kLinearSvm,
  kDummyStratified,
  kDummyRandom,
};

std::string_view family_name(Family family);
Family parse_family(std::string_view name);
bool is_dummy(Family family);

// Hyper-parameter values are kept as text ("0.1", "l1", "None") so specs
// serialize and hash canonically.
using HyperParams = std::map<std::string, std::string>;

struct ModelSpec {
  Family family = Family::kLogReg;
  HyperParams hyperparams;
  std::uint64_t seed = 0;
  // Display name of the baseline row, e.g. "XGB" for the second
  // gradient-boosting grid.
  std::string name;
};

// Standardized linear model shared by LogReg and LinearSVM.
struct LinearParams {
  std::vector<double> weights;  // raw feature scale
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> std_weights;  // standardized scale
  double std_bias = 0.0;
  std::vector<double> objective_trace;
};

struct ForestParams {
  std::vector<Tree> trees;
};

struct BoostParams {
  double init = 0.0;  // log-odds of the training prior
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  std::vector<double> loss_trace;  // training log-loss after each round
};

struct DummyParams {
  double prior = 0.0;
};

using ModelState = std::variant<LinearParams, ForestParams, BoostParams, DummyParams>;

struct TrainedModel {
  ModelSpec spec;
  ModelState state;
  std::vector<double> feature_importance;
  double train_seconds = 0.0;
  bool converged = true;
  std::size_t iterations = 0;

  std::size_t num_features() const { return feature_importance.size(); }
};

struct TrainOptions {
  // Worker threads for forest training; 0 = hardware concurrency.
  unsigned threads = 0;
};

// Throws kDegenerateClass when a non-dummy family sees a single class and
// kInvalidArgument for malformed hyper-parameters. Non-convergence is
// reported through TrainedModel::converged.
TrainedModel train(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                   const TrainOptions& options = {});
TrainedModel train(const ModelSpec& spec, const LabeledDataset& data,
                   const TrainOptions& options = {});

// Real-valued decision score; label is 1 iff score > 0.
double decision_score(const TrainedModel& model, std::span<const double> x);
int predict(const TrainedModel& model, std::span<const double> x);
std::vector<int> predict_all(const TrainedModel& model, const Matrix& x);

// i.i.d. Bernoulli(prior) draws. The two kinds use independent streams.
std::vector<int> dummy_predict(Family kind, double prior, std::uint64_t seed, std::size_t n);

// Training log-loss of a boosted model after each round (for diagnostics).
double log_loss(std::span<const double> scores, std::span<const int> y);

}  // namespace clinicl
