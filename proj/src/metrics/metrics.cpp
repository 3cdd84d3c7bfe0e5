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

#include "clinicl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"

namespace clinicl {
namespace {

MaybeReal ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

MaybeReal diff(const MaybeReal& a, const MaybeReal& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

MaybeReal abs_of(const MaybeReal& a) {
  if (!a) return std::nullopt;
  return std::abs(*a);
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                "vectors differ in length: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

ConfusionCounts confusion(std::span<const int> preds, std::span<const int> labels) {
  check_lengths(preds.size(), labels.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i];
    const int y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      throw Error(ErrorCode::kInvalidArgument, "labels and predictions must be 0 or 1");
    }
    if (p == 1 && y == 1) ++c.tp;
    if (p == 1 && y == 0) ++c.fp;
    if (p == 0 && y == 1) ++c.fn;
    if (p == 0 && y == 0) ++c.tn;
  }
  return c;
}

MaybeReal recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }
MaybeReal precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }
MaybeReal accuracy(const ConfusionCounts& c) { return ratio(c.tp + c.tn, c.total()); }
MaybeReal false_positive_rate(const ConfusionCounts& c) { return ratio(c.fp, c.fp + c.tn); }
MaybeReal positive_rate(const ConfusionCounts& c) { return ratio(c.tp + c.fp, c.total()); }

MaybeReal f_beta(const ConfusionCounts& c, double beta) {
  if (c.tp + c.fp + c.fn == 0) return std::nullopt;
  const double b2 = beta * beta;
  const double tp = static_cast<double>(c.tp);
  return (1.0 + b2) * tp /
         ((1.0 + b2) * tp + b2 * static_cast<double>(c.fn) + static_cast<double>(c.fp));
}

MaybeReal f1(const ConfusionCounts& c) {
  if (c.tp + c.fp + c.fn == 0) return std::nullopt;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fn + c.fp);
}

MaybeReal f3(const ConfusionCounts& c) {
  if (c.tp + c.fp + c.fn == 0) return std::nullopt;
  return 10.0 * static_cast<double>(c.tp) / static_cast<double>(10 * c.tp + 9 * c.fn + c.fp);
}

double f_beta_from_rates(double recall, double precision, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  if (den == 0.0) {
    throw Error(ErrorCode::kUndefinedMetric, "F-beta undefined for zero precision and recall");
  }
  return (1.0 + b2) * precision * recall / den;
}

double equalized_odds_distance(double tpr_diff, double fpr_diff) {
  return (std::abs(tpr_diff) + std::abs(fpr_diff)) / 2.0;
}

FairnessReport fairness_gaps(std::span<const int> preds, std::span<const int> labels,
                             std::span<const int> groups, int reference,
                             const std::vector<std::string>& names) {
  check_lengths(preds.size(), labels.size());
  check_lengths(preds.size(), groups.size());
  const std::set<int> present(groups.begin(), groups.end());
  if (present.size() != 2 || !present.count(reference)) {
    throw Error(ErrorCode::kGroupCountInvalid,
                "fairness needs exactly two groups including the reference; found " +
                    std::to_string(present.size()));
  }
  const int other = *present.begin() == reference ? *present.rbegin() : *present.begin();
  FairnessReport report;
  for (const int g : {reference, other}) {
    std::vector<int> p, y;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i] == g) {
        p.push_back(preds[i]);
        y.push_back(labels[i]);
      }
    }
    GroupRates rates;
    rates.counts = confusion(p, y);
    rates.tpr = recall(rates.counts);
    rates.fpr = false_positive_rate(rates.counts);
    rates.ppv = precision(rates.counts);
    rates.acc = accuracy(rates.counts);
    rates.positive_rate = positive_rate(rates.counts);
    report.per_group.push_back(rates);
    const auto code = static_cast<std::size_t>(g);
    report.group_names.push_back(code < names.size() ? names[code] : std::to_string(g));
  }
  const GroupRates& a = report.per_group[0];
  const GroupRates& b = report.per_group[1];
  report.dp_diff = diff(a.positive_rate, b.positive_rate);
  report.tpr_diff = diff(a.tpr, b.tpr);
  report.fpr_diff = diff(a.fpr, b.fpr);
  report.eo_gap = abs_of(report.tpr_diff);
  report.pp_gap = abs_of(diff(a.ppv, b.ppv));
  report.peacc_gap = abs_of(diff(a.acc, b.acc));
  if (report.tpr_diff && report.fpr_diff) {
    report.eod = equalized_odds_distance(*report.tpr_diff, *report.fpr_diff);
  }
  return report;
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed,
                                           std::size_t replicate) {
  Rng rng(derive_seed(derive_seed(seed, "bootstrap"), replicate));
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

BootstrapResult bootstrap(const MetricFn& metric, std::span<const int> preds,
                          std::span<const int> labels, std::size_t replicates,
                          std::uint64_t seed) {
  check_lengths(preds.size(), labels.size());
  const std::size_t n = preds.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "bootstrap needs at least 2 cases");
  if (replicates == 0) throw Error(ErrorCode::kInvalidArgument, "bootstrap needs replicates");
  BootstrapResult result;
  std::vector<int> p(n), y(n);
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto idx = bootstrap_indices(n, seed, r);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = preds[idx[i]];
      y[i] = labels[idx[i]];
    }
    const MaybeReal value = metric(confusion(p, y));
    if (value) {
      result.replicates.push_back(*value);
    } else {
      ++result.skipped;
    }
  }
  if (2 * result.skipped > replicates) {
    throw Error(ErrorCode::kTooManyUndefinedReplicates,
                std::to_string(result.skipped) + " of " + std::to_string(replicates) +
                    " bootstrap replicates were undefined",
                static_cast<std::int64_t>(result.skipped));
  }
  result.ci = {percentile(result.replicates, 2.5), percentile(result.replicates, 97.5)};
  return result;
}

Interval bootstrap_ci(const MetricFn& metric, std::span<const int> preds,
                      std::span<const int> labels, std::size_t replicates, std::uint64_t seed) {
  return bootstrap(metric, preds, labels, replicates, seed).ci;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_lengths(xs.size(), ys.size());
  if (xs.size() < 2) throw Error(ErrorCode::kDegenerateVector, "correlation needs n >= 2");
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateVector, "correlation of a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_lengths(xs.size(), ys.size());
  const std::size_t n = xs.size();
  if (n < 2) throw Error(ErrorCode::kDegenerateVector, "spearman needs n >= 2");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const auto has_ties = [](std::vector<double> r) {
    std::sort(r.begin(), r.end());
    return std::adjacent_find(r.begin(), r.end()) != r.end();
  };
  if (has_ties(rx) || has_ties(ry)) return pearson(rx, ry);
  double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

double point_biserial(std::span<const int> flags, std::span<const double> values) {
  check_lengths(flags.size(), values.size());
  const std::size_t n = values.size();
  double sum1 = 0, sum0 = 0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (flags[i] == 1) {
      sum1 += values[i];
      ++n1;
    } else if (flags[i] == 0) {
      sum0 += values[i];
      ++n0;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "point-biserial flags must be 0 or 1");
    }
  }
  if (n1 == 0 || n0 == 0) {
    throw Error(ErrorCode::kDegenerateGroup, "point-biserial needs both flag groups");
  }
  const double mean = mean_of(values);
  double ss = 0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sx = std::sqrt(ss / static_cast<double>(n));
  if (sx == 0.0) throw Error(ErrorCode::kZeroVariance, "point-biserial values are constant");
  const double nn = static_cast<double>(n);
  const double r = (sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0)) / sx *
                   std::sqrt(static_cast<double>(n1) * static_cast<double>(n0) / (nn * nn));
  return std::clamp(r, -1.0, 1.0);
}

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kDegenerateGroup, "Mann-Whitney needs two non-empty samples");
  }
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = average_ranks(pooled);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  MannWhitney out;
  out.u = r1 - n1 * (n1 + 1.0) / 2.0;
  // Tie correction for the variance.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double n = n1 + n2;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var > 0) {
    out.z = (out.u - n1 * n2 / 2.0) / std::sqrt(var);
    out.p_two_sided = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  }
  return out;
}

MetricReport make_report(std::span<const int> preds, std::span<const int> labels,
                         std::size_t replicates, std::uint64_t seed) {
  MetricReport report;
  report.n = preds.size();
  report.counts = confusion(preds, labels);
  report.recall = recall(report.counts);
  report.precision = precision(report.counts);
  report.f1 = f1(report.counts);
  report.f3 = f3(report.counts);
  if (replicates == 0 || preds.size() < 2) return report;
  const std::pair<const char*, MetricFn> metrics[] = {
      {"recall", [](const ConfusionCounts& c) { return recall(c); }},
      {"precision", [](const ConfusionCounts& c) { return precision(c); }},
      {"f1", [](const ConfusionCounts& c) { return f1(c); }},
      {"f3", [](const ConfusionCounts& c) { return f3(c); }},
  };
  for (const auto& [name, fn] : metrics) {
    if (!fn(report.counts)) continue;
    try {
      report.ci[name] = bootstrap_ci(fn, preds, labels, replicates, seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooManyUndefinedReplicates) throw;
    }
  }
  return report;
}

}  // namespace clinicl
