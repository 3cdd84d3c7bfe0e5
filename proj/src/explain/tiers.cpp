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

#include "clinicl/explain/tiers.hpp"

#include <algorithm>
#include <numeric>

#include "clinicl/assets_generated.hpp"
#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

std::vector<double> l1_normalized(const std::vector<double>& v) {
  double total = 0;
  for (const double x : v) {
    if (!(x >= 0)) throw Error(ErrorCode::kInvalidArgument, "importances must be non-negative");
    total += x;
  }
  if (total <= 0) throw Error(ErrorCode::kZeroVector, "importance vector sums to zero");
  std::vector<double> out(v);
  for (double& x : out) x /= total;
  return out;
}

const FeatureSpec& find_spec(std::span<const FeatureSpec> specs, const std::string& name) {
  for (const auto& s : specs) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kUnknownFeature, "feature '" + name + "' has no descriptor entry");
}

std::string bullet_list(const std::vector<std::string>& names, std::span<const FeatureSpec> specs) {
  if (names.empty()) return "- none";
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += '\n';
    out += "- " + find_spec(specs, n).long_name;
  }
  return out;
}

}  // namespace

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::kMinor:
      return "minor";
    case Tier::kModerate:
      return "moderate";
    case Tier::kDominant:
      return "dominant";
  }
  return "?";
}

Tier KnowledgeTiers::tier_of(std::string_view feature) const {
  const auto in = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), feature) != v.end();
  };
  if (in(dominant)) return Tier::kDominant;
  if (in(moderate)) return Tier::kModerate;
  if (in(minor)) return Tier::kMinor;
  throw Error(ErrorCode::kUnknownFeature, "feature '" + std::string(feature) + "' is not tiered");
}

std::vector<double> aggregate_importances(const std::vector<std::vector<double>>& phis) {
  if (phis.empty()) throw Error(ErrorCode::kInvalidArgument, "no importance vectors");
  const std::size_t p = phis.front().size();
  std::vector<double> mean(p, 0.0);
  for (const auto& phi : phis) {
    if (phi.size() != p) {
      throw Error(ErrorCode::kInvalidArgument, "importance vectors differ in length");
    }
    const auto norm = l1_normalized(phi);
    for (std::size_t f = 0; f < p; ++f) mean[f] += norm[f];
  }
  for (double& x : mean) x /= static_cast<double>(phis.size());
  return l1_normalized(mean);
}

double nearest_rank_quantile(std::span<const double> values, int percent) {
  if (values.empty() || percent <= 0 || percent > 100) {
    throw Error(ErrorCode::kInvalidArgument, "bad nearest-rank quantile request");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // Integer ceiling avoids 0.33 * n rounding drift.
  const std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

KnowledgeTiers quantile_bucket(std::span<const double> phi, std::span<const std::string> names) {
  const std::size_t p = phi.size();
  if (p < 3) throw Error(ErrorCode::kTooFewFeatures, "need at least three features to bucket");
  if (!names.empty() && names.size() != p) {
    throw Error(ErrorCode::kInvalidArgument, "feature names and importances differ in length");
  }
  for (const double v : phi) {
    if (!(v >= 0)) throw Error(ErrorCode::kInvalidArgument, "importances must be non-negative");
  }
  KnowledgeTiers t;
  t.aggregated_phi.assign(phi.begin(), phi.end());
  for (std::size_t f = 0; f < p; ++f) {
    t.feature_names.push_back(names.empty() ? "f" + std::to_string(f + 1) : names[f]);
  }
  t.q_min = nearest_rank_quantile(phi, 33);
  t.q_mod = nearest_rank_quantile(phi, 67);
  t.q_dom = nearest_rank_quantile(phi, 100);

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return phi[a] > phi[b]; });
  for (const std::size_t f : order) {
    const double v = phi[f];
    auto& tier = v <= t.q_min ? t.minor : (v <= t.q_mod ? t.moderate : t.dominant);
    tier.push_back(t.feature_names[f]);
  }
  return t;
}

std::string render_domain_block(const KnowledgeTiers& tiers, std::span<const FeatureSpec> specs,
                                bool include_moderate) {
  const bool has_moderate = include_moderate && !tiers.moderate.empty();
  if (tiers.dominant.empty() && !has_moderate) return "";
  static const std::vector<std::string> kNone;
  std::string block = render_template(
      assets::k_domain,
      {{"dominant", bullet_list(tiers.dominant, specs)},
       {"moderate", bullet_list(include_moderate ? tiers.moderate : kNone, specs)}});
  while (!block.empty() && block.back() == '\n') block.pop_back();
  return block;
}

std::string tiers_to_json(const KnowledgeTiers& tiers) {
  nlohmann::ordered_json j;
  j["boundaries"] = {{"q_min", tiers.q_min}, {"q_mod", tiers.q_mod}, {"q_dom", tiers.q_dom}};
  j["source_models"] = tiers.source_models;
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < tiers.feature_names.size(); ++f) {
    const auto& name = tiers.feature_names[f];
    features.push_back({{"name", name},
                        {"phi", tiers.aggregated_phi[f]},
                        {"tier", std::string(tier_name(tiers.tier_of(name)))}});
  }
  j["features"] = std::move(features);
  j["dominant"] = tiers.dominant;
  j["moderate"] = tiers.moderate;
  j["minor"] = tiers.minor;
  return j.dump(2) + "\n";
}

KnowledgeTiers tiers_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    KnowledgeTiers t;
    const auto& b = j.at("boundaries");
    t.q_min = b.at("q_min").get<double>();
    t.q_mod = b.at("q_mod").get<double>();
    t.q_dom = b.at("q_dom").get<double>();
    t.source_models = j.at("source_models").get<std::vector<std::string>>();
    for (const auto& f : j.at("features")) {
      t.feature_names.push_back(f.at("name").get<std::string>());
      t.aggregated_phi.push_back(f.at("phi").get<double>());
    }
    t.dominant = j.at("dominant").get<std::vector<std::string>>();
    t.moderate = j.at("moderate").get<std::vector<std::string>>();
    t.minor = j.at("minor").get<std::vector<std::string>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed tiers file: ") + e.what());
  }
}

}  // namespace clinicl
