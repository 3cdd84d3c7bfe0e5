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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace clinicl {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const int> preds, std::span<const int> labels);

// A metric value that may be undefined (zero denominator). Undefined values
// are never silently replaced by 0 inside reports.
using MaybeReal = std::optional<double>;

MaybeReal recall(const ConfusionCounts& c);
MaybeReal precision(const ConfusionCounts& c);
MaybeReal accuracy(const ConfusionCounts& c);
MaybeReal false_positive_rate(const ConfusionCounts& c);
MaybeReal positive_rate(const ConfusionCounts& c);

// General form (1 + b^2) P R / (b^2 P + R) written over counts:
// (1 + b^2) TP / ((1 + b^2) TP + b^2 FN + FP). Undefined when tp=fp=fn=0.
MaybeReal f_beta(const ConfusionCounts& c, double beta);
MaybeReal f1(const ConfusionCounts& c);  // 2TP / (2TP + FN + FP)
MaybeReal f3(const ConfusionCounts& c);  // 10TP / (10TP + 9FN + FP)
// Rate-level form used when only (recall, precision) are known.
double f_beta_from_rates(double recall, double precision, double beta);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct MetricReport {
  std::size_t n = 0;
  ConfusionCounts counts;
  MaybeReal recall;
  MaybeReal precision;
  MaybeReal f1;
  MaybeReal f3;
  std::map<std::string, Interval> ci;  // keyed by metric name
};

struct GroupRates {
  ConfusionCounts counts;
  MaybeReal tpr;
  MaybeReal fpr;
  MaybeReal ppv;
  MaybeReal acc;
  MaybeReal positive_rate;
};

struct FairnessReport {
  // Index 0 is the reference group (A), index 1 the comparison group (B).
  std::vector<std::string> group_names;
  std::vector<GroupRates> per_group;
  MaybeReal dp_diff;   // positive-rate(A) - positive-rate(B)
  MaybeReal tpr_diff;  // A - B
  MaybeReal fpr_diff;  // A - B
  MaybeReal eo_gap;    // |tpr_diff|
  MaybeReal pp_gap;    // |ppv(A) - ppv(B)|
  MaybeReal peacc_gap; // |acc(A) - acc(B)|
  MaybeReal eod;       // (|tpr_diff| + |fpr_diff|) / 2
};

// `groups` holds codes; exactly two distinct codes must be present and
// `reference` must be one of them. Names are indexed by code.
FairnessReport fairness_gaps(std::span<const int> preds, std::span<const int> labels,
                             std::span<const int> groups, int reference,
                             const std::vector<std::string>& names);

// Mean of the absolute TPR and FPR gaps.
double equalized_odds_distance(double tpr_diff, double fpr_diff);

using MetricFn = std::function<MaybeReal(const ConfusionCounts&)>;

struct BootstrapResult {
  Interval ci;
  std::vector<double> replicates;  // defined replicate values, in draw order
  std::size_t skipped = 0;
};

// Case-level percentile bootstrap. Replicate r resamples with its own stream
// derived from (seed, r), so results do not depend on evaluation order.
BootstrapResult bootstrap(const MetricFn& metric, std::span<const int> preds,
                          std::span<const int> labels, std::size_t replicates,
                          std::uint64_t seed);
Interval bootstrap_ci(const MetricFn& metric, std::span<const int> preds,
                      std::span<const int> labels, std::size_t replicates,
                      std::uint64_t seed);

// Resample indices used by replicate r; exposed for index-sharing checks.
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed,
                                           std::size_t replicate);

// Linear-interpolation percentile (numpy default) of unsorted values, q in
// [0, 100].
double percentile(std::vector<double> values, double q);

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);
double pearson(std::span<const double> xs, std::span<const double> ys);
double spearman(std::span<const double> xs, std::span<const double> ys);
double point_biserial(std::span<const int> flags, std::span<const double> values);

struct MannWhitney {
  double u = 0.0;          // U statistic of the first sample
  double z = 0.0;          // normal approximation with tie correction
  double p_two_sided = 1.0;
};
MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b);

MetricReport make_report(std::span<const int> preds, std::span<const int> labels,
                         std::size_t replicates, std::uint64_t seed);

}  // namespace clinicl
