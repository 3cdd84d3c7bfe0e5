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

#include <span>
#include <vector>

#include "clinicl/baselines/models.hpp"

namespace clinicl::internal {

struct FitOutcome {
  ModelState state;
  std::vector<double> importance;
  bool converged = true;
  std::size_t iterations = 0;
};

FitOutcome fit_logreg(const Matrix& x, std::span<const int> y, double c, bool l1);
FitOutcome fit_linear_svm(const Matrix& x, std::span<const int> y, double c);

struct ForestConfig {
  std::size_t n_estimators = 100;
  int max_depth = -1;
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};
FitOutcome fit_random_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config);

struct BoostConfig {
  std::size_t n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double subsample = 1.0;
  std::uint64_t seed = 0;
};
FitOutcome fit_gradient_boosting(const Matrix& x, std::span<const int> y,
                                 const BoostConfig& config);

double sigmoid(double z);

}  // namespace clinicl::internal
