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
#include <string>
#include <string_view>
#include <vector>

#include "clinicl/data/dataset.hpp"

namespace clinicl {

enum class Tier { kMinor = 0, kModerate = 1, kDominant = 2 };

std::string_view tier_name(Tier tier);

struct KnowledgeTiers {
  // Feature names ordered by descending importance within each tier.
  std::vector<std::string> dominant;
  std::vector<std::string> moderate;
  std::vector<std::string> minor;
  double q_min = 0.0;
  double q_mod = 0.0;
  double q_dom = 0.0;
  std::vector<std::string> source_models;
  std::vector<std::string> feature_names;  // order of aggregated_phi
  std::vector<double> aggregated_phi;

  Tier tier_of(std::string_view feature) const;
  bool operator==(const KnowledgeTiers&) const = default;
};

// L1-normalizes each vector, averages entrywise and renormalizes. Throws
// kZeroVector for an all-zero input and kInvalidArgument for negative entries
// or length mismatches.
std::vector<double> aggregate_importances(const std::vector<std::vector<double>>& phis);

// Nearest-rank quantile: the value at 1-based rank ceil(percent * n / 100)
// of the ascending sort.
double nearest_rank_quantile(std::span<const double> values, int percent);

// Tiers from the 33rd, 67th and 100th nearest-rank percentiles with the
// lowest interval closed at 0. Names default to f1..fp. Throws
// kTooFewFeatures below three features.
KnowledgeTiers quantile_bucket(std::span<const double> phi,
                               std::span<const std::string> names = {});

// Domain-knowledge block naming dominant then moderate features by their long
// names. Empty when both lists are empty (or dominant is empty and moderate
// is excluded). Throws kUnknownFeature for a name not in `specs`.
std::string render_domain_block(const KnowledgeTiers& tiers,
                                std::span<const FeatureSpec> specs,
                                bool include_moderate = true);

// Structured artifact listing each feature's importance and tier.
std::string tiers_to_json(const KnowledgeTiers& tiers);
KnowledgeTiers tiers_from_json(std::string_view text);

}  // namespace clinicl
