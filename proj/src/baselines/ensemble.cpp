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

// Tree ensembles: bagged Gini forests and Newton-step gradient boosting on
// logistic loss.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "baselines/internal.hpp"
#include "clinicl/common/error.hpp"

namespace clinicl::internal {
namespace {

void normalize_in_place(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total > 0) {
    for (double& x : v) x /= total;
  }
}

double logistic_loss_at(double score, int y) {
  // -[y log p + (1 - y) log(1 - p)] with p = sigmoid(score).
  const double m = y == 1 ? score : -score;
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

FitOutcome fit_random_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config) {
  if (config.n_estimators == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_estimators must be positive");
  }
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const FeatureIndex index(x);
  std::vector<double> targets(y.begin(), y.end());

  TreeParams params;
  params.criterion = SplitCriterion::kGini;
  params.max_depth = config.max_depth;
  params.min_samples_split = config.min_samples_split;
  params.max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));

  const LeafFn leaf = [&](std::span<const std::size_t> rows) {
    double pos = 0;
    for (const std::size_t r : rows) pos += targets[r];
    return pos / static_cast<double>(rows.size());
  };

  std::vector<Tree> trees(config.n_estimators);
  std::vector<std::vector<double>> per_tree(config.n_estimators, std::vector<double>(p, 0.0));
  // Each tree owns a stream derived from (seed, tree index), so any thread
  // count gives identical forests.
  const auto grow_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(config.seed, t));
      std::vector<std::size_t> rows(n);
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
      trees[t] = grow_tree(x, index, targets, std::move(rows), params, &rng, leaf, per_tree[t]);
      normalize_in_place(per_tree[t]);
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.n_estimators)));
  if (workers == 1) {
    grow_range(0, config.n_estimators);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (config.n_estimators + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(config.n_estimators, begin + chunk);
      if (begin < end) pool.emplace_back(grow_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  FitOutcome out;
  out.importance.assign(p, 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t f = 0; f < p; ++f) out.importance[f] += imp[f];
  }
  for (double& v : out.importance) v /= static_cast<double>(config.n_estimators);
  normalize_in_place(out.importance);
  out.state = ForestParams{std::move(trees)};
  return out;
}

FitOutcome fit_gradient_boosting(const Matrix& x, std::span<const int> y,
                                 const BoostConfig& config) {
  if (config.n_estimators == 0 || !(config.learning_rate > 0) ||
      !(config.subsample > 0 && config.subsample <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid gradient boosting hyper-parameters");
  }
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const FeatureIndex index(x);

  const double prior = std::clamp(
      static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(n), 1e-6,
      1.0 - 1e-6);
  BoostParams bp;
  bp.init = std::log(prior / (1.0 - prior));
  bp.learning_rate = config.learning_rate;

  std::vector<double> score(n, bp.init), residual(n);
  TreeParams params;
  params.criterion = SplitCriterion::kVariance;
  params.max_depth = config.max_depth;

  // Newton leaf value scaled by the learning rate, halved until the leaf's
  // own log-loss does not increase. Losses are separable across leaves, so
  // full-sample rounds never increase the training loss.
  const LeafFn leaf = [&](std::span<const std::size_t> rows) {
    double num = 0, den = 0;
    for (const std::size_t r : rows) {
      const double prob = sigmoid(score[r]);
      num += residual[r];
      den += prob * (1.0 - prob);
    }
    if (den < 1e-12) return 0.0;
    const auto leaf_loss = [&](double delta) {
      double acc = 0;
      for (const std::size_t r : rows) acc += logistic_loss_at(score[r] + delta, y[r]);
      return acc;
    };
    const double base = leaf_loss(0.0);
    double delta = config.learning_rate * num / den;
    for (int halvings = 0; halvings < 40; ++halvings) {
      if (leaf_loss(delta) <= base) return delta;
      delta *= 0.5;
    }
    return 0.0;
  };

  std::vector<double> importance(p, 0.0);
  const std::size_t in_bag =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.subsample * n)));
  for (std::size_t m = 0; m < config.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - sigmoid(score[i]);
    std::vector<std::size_t> rows;
    if (in_bag < n) {
      Rng rng(derive_seed(config.seed, m));
      rows = sample_without_replacement(rng, n, in_bag);
      std::sort(rows.begin(), rows.end());
    } else {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    Tree tree = grow_tree(x, index, residual, std::move(rows), params, nullptr, leaf, importance);
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += tree.predict(x.row(i));
      loss += logistic_loss_at(score[i], y[i]);
    }
    bp.loss_trace.push_back(loss / static_cast<double>(n));
    bp.trees.push_back(std::move(tree));
  }
  normalize_in_place(importance);
  FitOutcome out;
  out.importance = std::move(importance);
  out.state = std::move(bp);
  return out;
}

}  // namespace clinicl::internal
