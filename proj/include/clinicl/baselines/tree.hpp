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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "clinicl/common/matrix.hpp"
#include "clinicl/common/random.hpp"

namespace clinicl {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
};

// Binary CART tree. x[feature] <= threshold goes left.
class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

enum class SplitCriterion {
  kGini,      // classification on 0/1 targets
  kVariance,  // regression
};

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::kGini;
  int max_depth = -1;  // -1 = grow until pure or unsplittable
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  // Features examined per split; 0 = all. When every examined feature is
  // constant in the node, further features are tried until a valid split is
  // found.
  std::size_t max_features = 0;
};

// Leaf value from the training rows (with multiplicity) that reach a leaf.
using LeafFn = std::function<double(std::span<const std::size_t> rows)>;

// Sorted distinct values of each column; shared by every tree grown on the
// same matrix.
class FeatureIndex {
 public:
  explicit FeatureIndex(const Matrix& x);
  const std::vector<double>& levels(std::size_t f) const { return levels_[f]; }
  int bin(std::size_t row, std::size_t f) const { return bins_[row * num_features_ + f]; }

 private:
  std::size_t num_features_;
  std::vector<std::vector<double>> levels_;
  std::vector<int> bins_;
};

// Grows a tree on `rows` (indices into x, repeats allowed for bootstrap
// samples) against real-valued `targets`. Adds each split's weighted impurity
// decrease to `importance` (length p). Ties between candidate splits go to
// the feature examined first and then the lowest threshold; zero-gain
// splits of impure nodes are allowed, so XOR-like patterns remain learnable.
Tree grow_tree(const Matrix& x, const FeatureIndex& index, std::span<const double> targets,
               std::vector<std::size_t> rows, const TreeParams& params, Rng* rng,
               const LeafFn& leaf_value, std::vector<double>& importance);

}  // namespace clinicl
