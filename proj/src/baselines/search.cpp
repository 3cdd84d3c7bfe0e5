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

#include "clinicl/baselines/search.hpp"

#include <algorithm>

#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/metrics/metrics.hpp"

namespace clinicl {

std::size_t Grid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return n;
}

HyperParams Grid::at(std::size_t index) const {
  HyperParams hp;
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    const auto& values = it->second;
    hp[it->first] = values[index % values.size()];
    index /= values.size();
  }
  return hp;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds,
                                          std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    if (by_class[k].size() < folds) {
      throw Error(ErrorCode::kDegenerateClass, "class " + std::to_string(k) + " has fewer than " +
                                                   std::to_string(folds) + " members");
    }
  }
  std::vector<std::size_t> assignment(labels.size());
  // Dealing class 0 then class 1 round-robin keeps folds within one row of
  // each other and stratified.
  std::size_t next = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    Rng rng(derive_seed(derive_seed(seed, "folds"), k));
    rng.shuffle(std::span<std::size_t>(by_class[k]));
    for (const std::size_t i : by_class[k]) assignment[i] = next++ % folds;
  }
  return assignment;
}

SearchResult random_search(Family family, const std::string& name, const Grid& grid,
                           const Matrix& x, std::span<const int> y,
                           const SearchOptions& options) {
  const std::size_t total = grid.size();
  if (total == 0) throw Error(ErrorCode::kInvalidArgument, "empty hyper-parameter grid");
  if (options.folds < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 folds");
  const auto fold_of = stratified_folds(y, options.folds, options.seed);
  const std::uint64_t model_seed = derive_seed(options.seed, "model");

  Rng draw_rng(derive_seed(options.seed, "draws"));
  const auto draws =
      sample_without_replacement(draw_rng, total, std::min(total, options.max_draws));

  SearchResult result;
  double best = -1.0;
  for (const std::size_t d : draws) {
    CvScore score;
    score.spec = ModelSpec{family, grid.at(d), model_seed, name};
    for (std::size_t k = 0; k < options.folds; ++k) {
      std::vector<std::size_t> tr, va;
      for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == k ? va : tr).push_back(i);
      std::vector<int> ytr, yva;
      for (const auto i : tr) ytr.push_back(y[i]);
      for (const auto i : va) yva.push_back(y[i]);
      const TrainedModel m = train(score.spec, x.select_rows(tr), ytr, options.train);
      const auto preds = predict_all(m, x.select_rows(va));
      score.fold_scores.push_back(f1(confusion(preds, yva)).value_or(0.0));
    }
    double sum = 0;
    for (const double s : score.fold_scores) sum += s;
    score.mean_f1 = sum / static_cast<double>(options.folds);
    if (score.mean_f1 > best) {
      best = score.mean_f1;
      result.best_spec = score.spec;
    }
    result.cv_scores.push_back(std::move(score));
  }
  result.draws_evaluated = result.cv_scores.size();
  return result;
}

std::vector<BaselineDef> default_baselines() {
  return {
      {"GB", Family::kGradientBoosting,
       Grid{{{"n_estimators", {"100", "200"}},
             {"learning_rate", {"0.03", "0.05", "0.1"}},
             {"max_depth", {"3", "5"}}}}},
      {"RF", Family::kRandomForest,
       Grid{{{"n_estimators", {"100", "200", "400"}},
             {"max_depth", {"None", "5", "10", "20"}},
             {"min_samples_split", {"2", "4"}}}}},
      {"SVM", Family::kLinearSvm, Grid{{{"C", {"0.1", "1", "10"}}}}},
      {"XGB", Family::kGradientBoosting,
       Grid{{{"n_estimators", {"50", "100", "200"}},
             {"max_depth", {"3", "5", "8"}},
             {"learning_rate", {"0.03", "0.1", "0.2"}},
             {"subsample", {"0.8", "1.0"}}}}},
      {"LogReg", Family::kLogReg,
       Grid{{{"C", {"0.1", "1", "10"}}, {"penalty", {"l1", "l2"}}}}},
  };
}

BaselineDef baseline_by_name(const std::string& name) {
  for (auto& def : default_baselines()) {
    if (def.name == name) return def;
  }
  if (name == "Stratified") return {name, Family::kDummyStratified, Grid{}};
  if (name == "Random") return {name, Family::kDummyRandom, Grid{}};
  throw Error(ErrorCode::kConfigError, "unknown baseline '" + name + "'");
}

}  // namespace clinicl
