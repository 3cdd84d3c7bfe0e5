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

#include "clinicl/baselines/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "clinicl/common/error.hpp"

namespace clinicl {
namespace {

struct Stats {
  double n = 0;
  double sum = 0;
  double sumsq = 0;

  void add(double y, double times = 1.0) {
    n += times;
    sum += y * times;
    sumsq += y * y * times;
  }
};

// Node impurity multiplied by the node's sample count.
double weighted_impurity(const Stats& s, SplitCriterion criterion) {
  if (s.n <= 0) return 0.0;
  if (criterion == SplitCriterion::kGini) {
    const double p = s.sum / s.n;
    return s.n * 2.0 * p * (1.0 - p);
  }
  return std::max(0.0, s.sumsq - s.sum * s.sum / s.n);
}

struct Candidate {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

class Grower {
 public:
  Grower(const Matrix& x, const FeatureIndex& index, std::span<const double> targets,
         const TreeParams& params, Rng* rng, const LeafFn& leaf_value,
         std::vector<double>& importance)
      : x_(x),
        index_(index),
        targets_(targets),
        params_(params),
        rng_(rng),
        leaf_value_(leaf_value),
        importance_(importance) {
    std::size_t max_bins = 0;
    for (std::size_t f = 0; f < x.cols(); ++f) max_bins = std::max(max_bins, index.levels(f).size());
    hist_.assign(max_bins, Stats{});
  }

  std::vector<TreeNode> run(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Stats node;
    for (const std::size_t r : rows) node.add(targets_[r]);
    const double impurity = weighted_impurity(node, params_.criterion);

    const bool stop = (params_.max_depth >= 0 && depth >= params_.max_depth) ||
                      rows.size() < params_.min_samples_split ||
                      rows.size() < 2 * params_.min_samples_leaf || impurity <= 1e-12;
    Candidate best;
    if (!stop) best = find_split(rows, node, impurity);
    if (!best.valid) {
      nodes_[id].value = leaf_value_(rows);
      return id;
    }

    importance_[best.feature] += std::max(0.0, best.gain);
    std::vector<std::size_t> left, right;
    for (const std::size_t r : rows) {
      (x_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = static_cast<int>(best.feature);
    nodes_[id].threshold = best.threshold;
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Candidate find_split(const std::vector<std::size_t>& rows, const Stats& node,
                       double impurity) {
    const std::size_t p = x_.cols();
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t quota = p;
    if (params_.max_features > 0 && params_.max_features < p && rng_ != nullptr) {
      rng_->shuffle(std::span<std::size_t>(order));
      quota = params_.max_features;
    }
    Candidate best;
    std::size_t examined = 0;
    for (const std::size_t f : order) {
      if (examined >= quota && best.valid) break;
      ++examined;
      scan_feature(f, rows, node, impurity, best);
    }
    return best;
  }

  void scan_feature(std::size_t f, const std::vector<std::size_t>& rows, const Stats& node,
                    double impurity, Candidate& best) {
    touched_.clear();
    for (const std::size_t r : rows) {
      const int b = index_.bin(r, f);
      Stats& h = hist_[static_cast<std::size_t>(b)];
      if (h.n == 0) touched_.push_back(b);
      h.add(targets_[r]);
    }
    std::sort(touched_.begin(), touched_.end());
    const auto& levels = index_.levels(f);
    const double min_leaf = static_cast<double>(params_.min_samples_leaf);
    Stats left;
    for (std::size_t k = 0; k + 1 < touched_.size(); ++k) {
      const Stats& h = hist_[static_cast<std::size_t>(touched_[k])];
      left.n += h.n;
      left.sum += h.sum;
      left.sumsq += h.sumsq;
      const Stats right{node.n - left.n, node.sum - left.sum, node.sumsq - left.sumsq};
      if (left.n < min_leaf || right.n < min_leaf) continue;
      const double gain = impurity - weighted_impurity(left, params_.criterion) -
                          weighted_impurity(right, params_.criterion);
      if (!best.valid || gain > best.gain) {
        best.valid = true;
        best.gain = gain;
        best.feature = f;
        best.threshold = (levels[static_cast<std::size_t>(touched_[k])] +
                          levels[static_cast<std::size_t>(touched_[k + 1])]) /
                         2.0;
      }
    }
    for (const int b : touched_) hist_[static_cast<std::size_t>(b)] = Stats{};
  }

  const Matrix& x_;
  const FeatureIndex& index_;
  std::span<const double> targets_;
  const TreeParams& params_;
  Rng* rng_;
  const LeafFn& leaf_value_;
  std::vector<double>& importance_;
  std::vector<TreeNode> nodes_;
  std::vector<Stats> hist_;
  std::vector<int> touched_;
};

}  // namespace

double Tree::predict(std::span<const double> x) const {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty tree");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes_[i].value;
}

std::size_t Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children always follow their parent in node order.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

FeatureIndex::FeatureIndex(const Matrix& x)
    : num_features_(x.cols()), levels_(x.cols()), bins_(x.rows() * x.cols()) {
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& lv = levels_[f];
    lv.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) lv.push_back(x(r, f));
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      bins_[r * num_features_ + f] =
          static_cast<int>(std::lower_bound(lv.begin(), lv.end(), x(r, f)) - lv.begin());
    }
  }
}

Tree grow_tree(const Matrix& x, const FeatureIndex& index, std::span<const double> targets,
               std::vector<std::size_t> rows, const TreeParams& params, Rng* rng,
               const LeafFn& leaf_value, std::vector<double>& importance) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot grow a tree on no rows");
  importance.resize(x.cols(), 0.0);
  Grower grower(x, index, targets, params, rng, leaf_value, importance);
  return Tree(grower.run(std::move(rows)));
}

}  // namespace clinicl
