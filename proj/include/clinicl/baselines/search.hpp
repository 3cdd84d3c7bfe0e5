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
#include <string>
#include <utility>
#include <vector>

#include "clinicl/baselines/models.hpp"

namespace clinicl {

// Ordered axes; the cartesian product is enumerated with the last axis
// varying fastest.
struct Grid {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;

  std::size_t size() const;
  HyperParams at(std::size_t index) const;
};

struct CvScore {
  ModelSpec spec;
  double mean_f1 = 0.0;
  std::vector<double> fold_scores;
};

struct SearchResult {
  ModelSpec best_spec;
  std::vector<CvScore> cv_scores;  // in draw order
  std::size_t draws_evaluated = 0;
};

struct SearchOptions {
  std::size_t folds = 3;
  std::size_t max_draws = 20;
  std::uint64_t seed = 0;
  TrainOptions train;
};

// Stratified, seed-shuffled fold assignment (fold id per row).
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds,
                                          std::uint64_t seed);

// Draws min(|grid|, max_draws) configurations uniformly without replacement
// and scores each by mean fold F1 (undefined fold F1 counts as 0). Ties keep
// the earliest draw. All draws share the same folds and model seed.
SearchResult random_search(Family family, const std::string& name, const Grid& grid,
                           const Matrix& x, std::span<const int> y,
                           const SearchOptions& options);

// The tuned baseline rows: LogReg, RF, GB, SVM and the XGB-style boosting
// grid, each with its grid.
struct BaselineDef {
  std::string name;
  Family family;
  Grid grid;
};
std::vector<BaselineDef> default_baselines();
BaselineDef baseline_by_name(const std::string& name);

}  // namespace clinicl
