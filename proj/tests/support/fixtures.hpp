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

#include <string>
#include <vector>

#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/data/dataset.hpp"

namespace clinicl::testing {

inline std::string source_path(const std::string& relative) {
  return std::string(CLINICL_SOURCE_DIR) + "/" + relative;
}

// Heart-style descriptor with the five attributes quoted in prompt examples.
inline DatasetDescriptor mini_heart_descriptor() {
  DatasetDescriptor d;
  d.name = "mini-heart";
  d.outcome = "heart disease";
  d.target_column = "num";
  d.positive_label_rule = "> 0";
  d.group_column = "sex";
  d.reference_group = "1";
  FeatureSpec age{"age", "Age", "age", FeatureKind::kNumeric, "", {}, "A {value}-year-old"};
  FeatureSpec sex{"sex", "Sex", "sex", FeatureKind::kCategorical, "",
                  {{"0", "female"}, {"1", "male"}}, " {value}"};
  FeatureSpec cp{"cp", "CP", "chest pain type", FeatureKind::kCategorical, "",
                 {{"1", "typical angina"}, {"2", "atypical angina"},
                  {"3", "non-anginal chest pain"}, {"4", "asymptomatic chest pain"}},
                 " presenting with {value}"};
  FeatureSpec bp{"trestbps", "BP", "resting blood pressure", FeatureKind::kNumeric, "mmHg",
                 {}, ", resting blood pressure of {value} mmHg"};
  FeatureSpec chol{"chol", "Chol", "serum cholesterol", FeatureKind::kNumeric, "mg/dL",
                   {}, " and serum cholesterol of {value} mg/dL"};
  d.feature_specs = {age, sex, cp, bp, chol};
  return d;
}

// Random raw table matching mini_heart_descriptor, with a planted signal.
inline RawTable random_heart_table(std::size_t n, std::uint64_t seed,
                                   double missing_rate = 0.0) {
  RawTable t;
  t.columns = {"age", "sex", "cp", "trestbps", "chol", "num"};
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double age = 30 + static_cast<double>(rng.below(45));
    const double sex = rng.bernoulli(0.7) ? 1 : 0;
    const double cp = 1 + static_cast<double>(rng.below(4));
    const double bp = 100 + static_cast<double>(rng.below(80));
    const double chol = 150 + static_cast<double>(rng.below(200));
    const bool sick = (age > 52) + (cp == 4) + (sex == 1) + rng.bernoulli(0.3) >= 2;
    std::vector<Cell> row = {age, sex, cp, bp, chol,
                             sick ? static_cast<double>(1 + rng.below(4)) : 0.0};
    for (std::size_t c = 0; c < 5; ++c) {
      if (rng.bernoulli(missing_rate)) row[c] = Cell{};
    }
    t.rows.push_back(std::move(row));
    t.lines.push_back(i + 2);
  }
  return t;
}

}  // namespace clinicl::testing
