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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clinicl/common/matrix.hpp"
#include "clinicl/data/csv.hpp"

namespace clinicl {

enum class FeatureKind { kNumeric, kCategorical };

struct FeatureSpec {
  std::string name;        // CSV column
  std::string short_name;  // label in numeric profiles, e.g. "BP"
  std::string long_name;   // clinical wording, e.g. "resting blood pressure"
  FeatureKind kind = FeatureKind::kNumeric;
  std::string unit;
  // Raw value text -> phrase. Required for categorical features.
  std::map<std::string, std::string> value_labels;
  // Narrative fragment with exactly one "{value}" placeholder. Fragments of
  // consecutive features are concatenated verbatim.
  std::string narration_template;
};

struct DatasetDescriptor {
  std::string name;
  std::string outcome = "the target condition";  // wording used in prompts
  std::string csv_path;
  std::string target_column;
  std::string positive_label_rule;  // e.g. "> 0", "== Yes", "in 1|2"
  std::string group_column;
  std::string reference_group;  // raw group value used as group A in diffs
  std::vector<FeatureSpec> feature_specs;
};

struct Provenance {
  bool sampled = false;
  double fraction = 1.0;
  std::uint64_t seed = 0;
};

struct LabeledDataset {
  Matrix rows;  // p columns, categoricals label-encoded
  std::vector<int> labels;
  std::vector<int> groups;
  std::vector<std::string> feature_names;
  // Per feature: raw text of each code; empty for numeric features.
  std::vector<std::vector<std::string>> codebooks;
  // Raw group values by group code, and the code of the reference group.
  std::vector<std::string> group_names;
  int reference_group = 0;
  // Row index in the source table, used as a stable case id.
  std::vector<std::size_t> source_rows;
  // Cells that were imputed; row-major like `rows`.
  std::vector<std::uint8_t> missing_mask;
  Provenance provenance;

  std::size_t size() const { return labels.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  bool was_missing(std::size_t r, std::size_t c) const {
    return missing_mask[r * num_features() + c] != 0;
  }

  // Rows in the given order; metadata is shared.
  LabeledDataset select(std::span<const std::size_t> indices) const;

  // Raw text of a cell: the codebook entry for categoricals, the number
  // otherwise.
  std::string display_value(std::size_t r, std::size_t c) const;

  std::size_t count_label(int label) const;
};

// Binarizes raw target values with a rule of the form "<op> <operand>",
// op in {>, >=, <, <=, ==, !=} or "in a|b|c".
class LabelRule {
 public:
  explicit LabelRule(std::string_view rule);
  // Throws kNonBinarizableTarget for missing cells or non-comparable values.
  int apply(const Cell& cell) const;

 private:
  std::string op_;
  std::vector<std::string> operands_;
};

struct PreprocessOptions {
  double drop_threshold = 0.40;
  std::size_t max_categories = 16;
};

// Checks that every column named by the descriptor exists in `raw`.
void validate_columns(const RawTable& raw, const DatasetDescriptor& descriptor);

RawTable load_csv(const DatasetDescriptor& descriptor);

LabeledDataset preprocess(const RawTable& raw,
                          const DatasetDescriptor& descriptor,
                          const PreprocessOptions& options = {});

// Renders a preprocessed dataset back to raw form (codes decoded, target as
// 0/1) so it can be fed to preprocess again.
RawTable to_raw_table(const LabeledDataset& ds,
                      const DatasetDescriptor& descriptor);

// Recomputes imputed cells of both splits from training statistics only.
void reimpute_from_train(LabeledDataset& train, LabeledDataset& test);

struct Split {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

Split stratified_split(const LabeledDataset& ds, double test_fraction,
                       std::uint64_t seed);

LabeledDataset subsample(const LabeledDataset& train, double fraction,
                         std::uint64_t seed);

// Sorted indices drawn per class; exposed for tests.
std::vector<std::size_t> subsample_indices(const LabeledDataset& train,
                                           double fraction, std::uint64_t seed);

// Per-class allocation of round(total * fraction) items by largest remainder,
// so that the grand total is exact and every class is within 1 of
// count * fraction.
std::vector<std::size_t> allocate_stratified(std::span<const std::size_t> counts,
                                             double fraction);

// Median with the even-count rule (mean of the two middle values).
double median(std::vector<double> values);

}  // namespace clinicl
