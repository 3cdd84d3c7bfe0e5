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

#include "clinicl/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"

namespace clinicl {
namespace {

// Sorted distinct raw values: numerically when every value is a number,
// lexicographically otherwise.
std::vector<std::string> sorted_levels(const std::vector<const Cell*>& cells) {
  std::vector<std::string> levels;
  bool all_numeric = true;
  std::vector<double> numbers;
  for (const Cell* cell : cells) {
    if (is_missing(*cell)) continue;
    if (const auto* d = std::get_if<double>(cell)) {
      numbers.push_back(*d);
    } else {
      all_numeric = false;
    }
    levels.push_back(cell_text(*cell));
  }
  if (all_numeric) {
    std::sort(numbers.begin(), numbers.end());
    numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
    levels.clear();
    for (const double v : numbers) levels.push_back(format_number(v));
    return levels;
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

int code_of(const std::vector<std::string>& levels, const std::string& text) {
  const auto it = std::find(levels.begin(), levels.end(), text);
  return it == levels.end() ? -1 : static_cast<int>(it - levels.begin());
}

// Most frequent code; ties go to the smallest code.
int modal_code(const std::vector<int>& codes, std::size_t num_levels) {
  std::vector<std::size_t> freq(num_levels, 0);
  for (const int c : codes) {
    if (c >= 0) ++freq[static_cast<std::size_t>(c)];
  }
  return static_cast<int>(std::max_element(freq.begin(), freq.end()) - freq.begin());
}

std::vector<std::vector<std::size_t>> indices_by_class(const LabeledDataset& ds) {
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }
  return by_class;
}

}  // namespace

LabeledDataset LabeledDataset::select(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.rows = rows.select_rows(indices);
  out.feature_names = feature_names;
  out.codebooks = codebooks;
  out.group_names = group_names;
  out.reference_group = reference_group;
  out.provenance = provenance;
  const std::size_t p = num_features();
  out.labels.reserve(indices.size());
  out.groups.reserve(indices.size());
  out.source_rows.reserve(indices.size());
  out.missing_mask.reserve(indices.size() * p);
  for (const std::size_t i : indices) {
    out.labels.push_back(labels[i]);
    out.groups.push_back(groups[i]);
    out.source_rows.push_back(source_rows[i]);
    out.missing_mask.insert(out.missing_mask.end(),
                            missing_mask.begin() + static_cast<std::ptrdiff_t>(i * p),
                            missing_mask.begin() + static_cast<std::ptrdiff_t>((i + 1) * p));
  }
  return out;
}

std::string LabeledDataset::display_value(std::size_t r, std::size_t c) const {
  const double v = rows(r, c);
  if (!codebooks[c].empty()) {
    return codebooks[c][static_cast<std::size_t>(v)];
  }
  return format_number(v);
}

std::size_t LabeledDataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

LabelRule::LabelRule(std::string_view rule) {
  const std::string text = trim(rule);
  static constexpr std::string_view kOps[] = {">=", "<=", "==", "!=", ">", "<"};
  for (const auto op : kOps) {
    if (text.rfind(op, 0) == 0) {
      op_ = std::string(op);
      operands_.push_back(trim(text.substr(op.size())));
      break;
    }
  }
  if (op_.empty() && text.rfind("in ", 0) == 0) {
    op_ = "in";
    for (const auto& part : split(text.substr(3), '|')) {
      operands_.push_back(trim(part));
    }
  }
  if (op_.empty() || operands_.empty() || operands_.front().empty()) {
    throw Error(ErrorCode::kConfigError,
                "unrecognised positive_label_rule '" + text + "'");
  }
}

int LabelRule::apply(const Cell& cell) const {
  if (is_missing(cell)) {
    throw Error(ErrorCode::kNonBinarizableTarget, "target cell is missing");
  }
  const std::string text = cell_text(cell);
  const auto matches = [&](const std::string& operand) {
    const auto* d = std::get_if<double>(&cell);
    const auto o = parse_number(operand);
    if (d && o) return *d == *o;
    return text == operand;
  };
  if (op_ == "in") {
    return std::any_of(operands_.begin(), operands_.end(), matches) ? 1 : 0;
  }
  if (op_ == "==") return matches(operands_[0]) ? 1 : 0;
  if (op_ == "!=") return matches(operands_[0]) ? 0 : 1;
  const auto* d = std::get_if<double>(&cell);
  const auto o = parse_number(operands_[0]);
  if (!d || !o) {
    throw Error(ErrorCode::kNonBinarizableTarget,
                "ordered comparison on non-numeric target '" + text + "'");
  }
  if (op_ == ">") return *d > *o;
  if (op_ == ">=") return *d >= *o;
  if (op_ == "<") return *d < *o;
  return *d <= *o;
}

void validate_columns(const RawTable& raw, const DatasetDescriptor& descriptor) {
  const auto require = [&](const std::string& name) {
    if (!raw.column_index(name)) {
      throw Error(ErrorCode::kMissingColumn, "column '" + name + "' not in CSV");
    }
  };
  require(descriptor.target_column);
  if (!descriptor.group_column.empty()) require(descriptor.group_column);
  for (const auto& spec : descriptor.feature_specs) require(spec.name);
}

RawTable load_csv(const DatasetDescriptor& descriptor) {
  RawTable raw = read_csv_file(descriptor.csv_path);
  validate_columns(raw, descriptor);
  return raw;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "median of an empty column");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

LabeledDataset preprocess(const RawTable& raw, const DatasetDescriptor& descriptor,
                          const PreprocessOptions& options) {
  validate_columns(raw, descriptor);
  const auto& specs = descriptor.feature_specs;
  const std::size_t p = specs.size();
  if (p == 0) throw Error(ErrorCode::kConfigError, "descriptor has no features");

  std::vector<std::size_t> cols(p);
  for (std::size_t f = 0; f < p; ++f) cols[f] = *raw.column_index(specs[f].name);
  const std::size_t target_col = *raw.column_index(descriptor.target_column);

  // Row filter over feature cells only.
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    std::size_t missing = 0;
    for (const std::size_t c : cols) missing += is_missing(raw.rows[r][c]) ? 1 : 0;
    const double share = static_cast<double>(missing) / static_cast<double>(p);
    if (share < options.drop_threshold) kept.push_back(r);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kAllRowsDropped,
                "every row has >= " + format_number(options.drop_threshold * 100) +
                    "% missing feature cells");
  }

  LabeledDataset ds;
  const std::size_t n = kept.size();
  ds.rows = Matrix(n, p);
  ds.missing_mask.assign(n * p, 0);
  ds.codebooks.resize(p);
  ds.source_rows = kept;
  for (const auto& spec : specs) ds.feature_names.push_back(spec.name);

  const LabelRule rule(descriptor.positive_label_rule);
  ds.labels.reserve(n);
  for (const std::size_t r : kept) {
    try {
      ds.labels.push_back(rule.apply(raw.rows[r][target_col]));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (line " +
                                std::to_string(raw.lines.empty() ? r + 2 : raw.lines[r]) + ")");
    }
  }

  for (std::size_t f = 0; f < p; ++f) {
    const std::size_t c = cols[f];
    if (specs[f].kind == FeatureKind::kNumeric) {
      std::vector<double> present;
      for (const std::size_t r : kept) {
        const Cell& cell = raw.rows[r][c];
        if (is_missing(cell)) continue;
        const auto* d = std::get_if<double>(&cell);
        if (!d) {
          throw Error(ErrorCode::kInvalidValue, "non-numeric value '" + cell_text(cell) +
                                                    "' in numeric column " + specs[f].name);
        }
        present.push_back(*d);
      }
      if (present.empty()) {
        throw Error(ErrorCode::kInvalidValue, "column " + specs[f].name + " is entirely missing");
      }
      const double fill = median(present);
      for (std::size_t i = 0; i < n; ++i) {
        const Cell& cell = raw.rows[kept[i]][c];
        if (is_missing(cell)) {
          ds.rows(i, f) = fill;
          ds.missing_mask[i * p + f] = 1;
        } else {
          ds.rows(i, f) = std::get<double>(cell);
        }
      }
    } else {
      std::vector<const Cell*> cells;
      for (const std::size_t r : kept) cells.push_back(&raw.rows[r][c]);
      auto levels = sorted_levels(cells);
      if (levels.empty()) {
        throw Error(ErrorCode::kInvalidValue, "column " + specs[f].name + " is entirely missing");
      }
      if (levels.size() > options.max_categories) {
        throw Error(ErrorCode::kInvalidValue,
                    "categorical column " + specs[f].name + " has " +
                        std::to_string(levels.size()) + " distinct values");
      }
      std::vector<int> codes(n, -1);
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_missing(*cells[i])) codes[i] = code_of(levels, cell_text(*cells[i]));
      }
      const int mode = modal_code(codes, levels.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (codes[i] < 0) {
          codes[i] = mode;
          ds.missing_mask[i * p + f] = 1;
        }
        ds.rows(i, f) = codes[i];
      }
      ds.codebooks[f] = std::move(levels);
    }
  }

  // Group attribute. When it is also a feature, reuse the imputed codes so
  // both views agree.
  if (descriptor.group_column.empty()) {
    ds.group_names = {"all"};
    ds.groups.assign(n, 0);
  } else {
    const auto as_feature = std::find_if(specs.begin(), specs.end(), [&](const FeatureSpec& s) {
      return s.name == descriptor.group_column;
    });
    if (as_feature != specs.end() && as_feature->kind == FeatureKind::kCategorical) {
      const std::size_t f = static_cast<std::size_t>(as_feature - specs.begin());
      ds.group_names = ds.codebooks[f];
      for (std::size_t i = 0; i < n; ++i) ds.groups.push_back(static_cast<int>(ds.rows(i, f)));
    } else {
      const std::size_t c = *raw.column_index(descriptor.group_column);
      std::vector<const Cell*> cells;
      for (const std::size_t r : kept) cells.push_back(&raw.rows[r][c]);
      ds.group_names = sorted_levels(cells);
      std::vector<int> codes(n, -1);
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_missing(*cells[i])) codes[i] = code_of(ds.group_names, cell_text(*cells[i]));
      }
      const int mode = modal_code(codes, ds.group_names.size());
      for (int& code : codes) code = code < 0 ? mode : code;
      ds.groups = std::move(codes);
    }
    if (!descriptor.reference_group.empty()) {
      std::string wanted = descriptor.reference_group;
      if (const auto v = parse_number(wanted)) wanted = format_number(*v);
      const int ref = code_of(ds.group_names, wanted);
      if (ref < 0) {
        throw Error(ErrorCode::kConfigError,
                    "reference group '" + descriptor.reference_group + "' not present");
      }
      ds.reference_group = ref;
    }
  }
  return ds;
}

RawTable to_raw_table(const LabeledDataset& ds, const DatasetDescriptor& descriptor) {
  RawTable raw;
  const std::size_t p = ds.num_features();
  raw.columns = ds.feature_names;
  const bool separate_group =
      !descriptor.group_column.empty() &&
      std::find(raw.columns.begin(), raw.columns.end(), descriptor.group_column) ==
          raw.columns.end();
  if (separate_group) raw.columns.push_back(descriptor.group_column);
  raw.columns.push_back(descriptor.target_column);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<Cell> row;
    for (std::size_t f = 0; f < p; ++f) {
      if (ds.codebooks[f].empty()) {
        row.emplace_back(ds.rows(i, f));
      } else {
        const std::string& text = ds.display_value(i, f);
        if (const auto v = parse_number(text)) {
          row.emplace_back(*v);
        } else {
          row.emplace_back(text);
        }
      }
    }
    if (separate_group) {
      const std::string& g = ds.group_names[static_cast<std::size_t>(ds.groups[i])];
      if (const auto v = parse_number(g)) {
        row.emplace_back(*v);
      } else {
        row.emplace_back(g);
      }
    }
    row.emplace_back(static_cast<double>(ds.labels[i]));
    raw.rows.push_back(std::move(row));
    raw.lines.push_back(i + 2);
  }
  return raw;
}

void reimpute_from_train(LabeledDataset& train, LabeledDataset& test) {
  const std::size_t p = train.num_features();
  for (std::size_t f = 0; f < p; ++f) {
    double fill = 0.0;
    if (train.codebooks[f].empty()) {
      std::vector<double> present;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (!train.was_missing(i, f)) present.push_back(train.rows(i, f));
      }
      if (present.empty()) continue;
      fill = median(std::move(present));
    } else {
      std::vector<int> codes;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (!train.was_missing(i, f)) codes.push_back(static_cast<int>(train.rows(i, f)));
      }
      if (codes.empty()) continue;
      fill = modal_code(codes, train.codebooks[f].size());
    }
    for (LabeledDataset* ds : {&train, &test}) {
      for (std::size_t i = 0; i < ds->size(); ++i) {
        if (ds->was_missing(i, f)) ds->rows(i, f) = fill;
      }
    }
  }
}

std::vector<std::size_t> allocate_stratified(std::span<const std::size_t> counts,
                                             double fraction) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(total) * fraction));
  std::vector<std::size_t> alloc(counts.size());
  std::vector<double> remainder(counts.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double exact = static_cast<double>(counts[k]) * fraction;
    alloc[k] = std::min(counts[k], static_cast<std::size_t>(std::floor(exact + 1e-9)));
    remainder[k] = exact - static_cast<double>(alloc[k]);
    assigned += alloc[k];
  }
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (const std::size_t k : order) {
    if (assigned >= target) break;
    if (alloc[k] < counts[k]) {
      ++alloc[k];
      ++assigned;
    }
  }
  return alloc;
}

Split stratified_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
  }
  const auto by_class = indices_by_class(ds);
  const std::vector<std::size_t> counts = {by_class[0].size(), by_class[1].size()};
  for (std::size_t k = 0; k < 2; ++k) {
    if (counts[k] < 2) {
      throw Error(ErrorCode::kDegenerateClass,
                  "class " + std::to_string(k) + " has fewer than 2 members");
    }
  }
  auto alloc = allocate_stratified(counts, test_fraction);
  Split split;
  const std::uint64_t split_seed = derive_seed(seed, "stratified_split");
  for (std::size_t k = 0; k < 2; ++k) {
    alloc[k] = std::clamp<std::size_t>(alloc[k], 1, counts[k] - 1);
    std::vector<std::size_t> members = by_class[k];
    Rng rng(derive_seed(split_seed, k));
    rng.shuffle(std::span<std::size_t>(members));
    split.test_indices.insert(split.test_indices.end(), members.begin(),
                              members.begin() + static_cast<std::ptrdiff_t>(alloc[k]));
    split.train_indices.insert(split.train_indices.end(),
                               members.begin() + static_cast<std::ptrdiff_t>(alloc[k]),
                               members.end());
  }
  std::sort(split.test_indices.begin(), split.test_indices.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  split.train = ds.select(split.train_indices);
  split.test = ds.select(split.test_indices);
  return split;
}

std::vector<std::size_t> subsample_indices(const LabeledDataset& train, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "subsample fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> picked;
  if (fraction == 1.0) {
    picked.resize(train.size());
    std::iota(picked.begin(), picked.end(), std::size_t{0});
    return picked;
  }
  const auto by_class = indices_by_class(train);
  const std::vector<std::size_t> counts = {by_class[0].size(), by_class[1].size()};
  const auto alloc = allocate_stratified(counts, fraction);
  const std::uint64_t sub_seed = derive_seed(seed, "subsample");
  for (std::size_t k = 0; k < 2; ++k) {
    if (alloc[k] == 0) {
      throw Error(ErrorCode::kDegenerateClass,
                  "subsample leaves class " + std::to_string(k) + " empty");
    }
    std::vector<std::size_t> members = by_class[k];
    Rng rng(derive_seed(sub_seed, k));
    rng.shuffle(std::span<std::size_t>(members));
    picked.insert(picked.end(), members.begin(),
                  members.begin() + static_cast<std::ptrdiff_t>(alloc[k]));
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

LabeledDataset subsample(const LabeledDataset& train, double fraction, std::uint64_t seed) {
  const auto picked = subsample_indices(train, fraction, seed);
  LabeledDataset out = train.select(picked);
  out.provenance = Provenance{true, fraction, seed};
  return out;
}

}  // namespace clinicl
