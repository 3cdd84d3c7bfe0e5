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

#include "clinicl/baselines/models.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <thread>

#include "baselines/internal.hpp"
#include "clinicl/common/error.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"

namespace clinicl {
namespace {

constexpr std::pair<Family, std::string_view> kFamilyNames[] = {
    {Family::kLogReg, "LogReg"},
    {Family::kRandomForest, "RandomForest"},
    {Family::kGradientBoosting, "GradientBoosting"},
    {Family::kLinearSvm, "LinearSVM"},
    {Family::kDummyStratified, "DummyStratified"},
    {Family::kDummyRandom, "DummyRandom"},
};

const std::string* find_param(const HyperParams& hp, const std::string& key) {
  const auto it = hp.find(key);
  return it == hp.end() ? nullptr : &it->second;
}

double param_double(const HyperParams& hp, const std::string& key, double fallback) {
  const std::string* text = find_param(hp, key);
  if (!text) return fallback;
  const auto v = parse_number(*text);
  if (!v) throw Error(ErrorCode::kInvalidArgument, "hyper-parameter " + key + " = '" + *text + "'");
  return *v;
}

std::size_t param_count(const HyperParams& hp, const std::string& key, std::size_t fallback) {
  const double v = param_double(hp, key, static_cast<double>(fallback));
  if (v < 0 || v != std::floor(v)) {
    throw Error(ErrorCode::kInvalidArgument, "hyper-parameter " + key + " must be a count");
  }
  return static_cast<std::size_t>(v);
}

// "None" (or absent with fallback -1) means unlimited depth.
int param_depth(const HyperParams& hp, const std::string& key, int fallback) {
  const std::string* text = find_param(hp, key);
  if (!text) return fallback;
  if (*text == "None" || *text == "none") return -1;
  return static_cast<int>(param_count(hp, key, 0));
}

std::string_view dummy_tag(Family kind) {
  return kind == Family::kDummyStratified ? "dummy-stratified" : "dummy-random";
}

}  // namespace

std::string_view family_name(Family family) {
  for (const auto& [f, name] : kFamilyNames) {
    if (f == family) return name;
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (const auto& [f, n] : kFamilyNames) {
    if (iequals(n, name)) return f;
  }
  throw Error(ErrorCode::kConfigError, "unknown model family '" + std::string(name) + "'");
}

bool is_dummy(Family family) {
  return family == Family::kDummyStratified || family == Family::kDummyRandom;
}

TrainedModel train(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                   const TrainOptions& options) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature rows and labels differ in length");
  }
  if (x.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot train on no rows");
  const auto positives = static_cast<std::size_t>(std::accumulate(y.begin(), y.end(), 0));
  if (!is_dummy(spec.family) && (positives == 0 || positives == y.size())) {
    throw Error(ErrorCode::kDegenerateClass, std::string(family_name(spec.family)) +
                                                 " needs both classes in the training data");
  }
  const auto start = std::chrono::steady_clock::now();
  const HyperParams& hp = spec.hyperparams;
  internal::FitOutcome fit;
  switch (spec.family) {
    case Family::kLogReg: {
      const std::string* penalty = find_param(hp, "penalty");
      const std::string pen = penalty ? *penalty : "l2";
      if (pen != "l1" && pen != "l2") {
        throw Error(ErrorCode::kInvalidArgument, "penalty must be l1 or l2");
      }
      fit = internal::fit_logreg(x, y, param_double(hp, "C", 1.0), pen == "l1");
      break;
    }
    case Family::kLinearSvm:
      fit = internal::fit_linear_svm(x, y, param_double(hp, "C", 1.0));
      break;
    case Family::kRandomForest: {
      internal::ForestConfig cfg;
      cfg.n_estimators = param_count(hp, "n_estimators", 100);
      cfg.max_depth = param_depth(hp, "max_depth", -1);
      cfg.min_samples_split = param_count(hp, "min_samples_split", 2);
      cfg.seed = spec.seed;
      cfg.threads = options.threads ? options.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
      fit = internal::fit_random_forest(x, y, cfg);
      break;
    }
    case Family::kGradientBoosting: {
      internal::BoostConfig cfg;
      cfg.n_estimators = param_count(hp, "n_estimators", 100);
      cfg.learning_rate = param_double(hp, "learning_rate", 0.1);
      cfg.max_depth = param_depth(hp, "max_depth", 3);
      cfg.subsample = param_double(hp, "subsample", 1.0);
      cfg.seed = spec.seed;
      fit = internal::fit_gradient_boosting(x, y, cfg);
      break;
    }
    case Family::kDummyStratified:
    case Family::kDummyRandom:
      fit.state = DummyParams{static_cast<double>(positives) / static_cast<double>(y.size())};
      fit.importance.assign(x.cols(), 0.0);
      break;
  }
  TrainedModel model;
  model.spec = spec;
  model.state = std::move(fit.state);
  model.feature_importance = std::move(fit.importance);
  model.converged = fit.converged;
  model.iterations = fit.iterations;
  model.train_seconds =
      is_dummy(spec.family)
          ? 0.0
          : std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return model;
}

TrainedModel train(const ModelSpec& spec, const LabeledDataset& data,
                   const TrainOptions& options) {
  return train(spec, data.rows, data.labels, options);
}

double decision_score(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != model.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(model.num_features()) + " features, got " +
                    std::to_string(x.size()));
  }
  if (const auto* lin = std::get_if<LinearParams>(&model.state)) {
    double s = lin->bias;
    for (std::size_t f = 0; f < x.size(); ++f) s += lin->weights[f] * x[f];
    return s;
  }
  if (const auto* forest = std::get_if<ForestParams>(&model.state)) {
    // Votes for class 1 minus half the forest; a tied vote scores 0.
    double votes = 0;
    for (const Tree& t : forest->trees) votes += t.predict(x) > 0.5 ? 1.0 : 0.0;
    return votes - static_cast<double>(forest->trees.size()) / 2.0;
  }
  if (const auto* boost = std::get_if<BoostParams>(&model.state)) {
    double s = boost->init;
    for (const Tree& t : boost->trees) s += t.predict(x);
    return s;
  }
  // Dummy: a uniform draw keyed by (seed, x), centred on the prior.
  const auto& dummy = std::get<DummyParams>(model.state);
  std::uint64_t h = derive_seed(model.spec.seed, dummy_tag(model.spec.family));
  for (const double v : x) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    h = mix64(h ^ bits);
  }
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return dummy.prior - u;
}

int predict(const TrainedModel& model, std::span<const double> x) {
  return decision_score(model, x) > 0.0 ? 1 : 0;
}

std::vector<int> predict_all(const TrainedModel& model, const Matrix& x) {
  if (is_dummy(model.spec.family)) {
    if (x.cols() != model.num_features()) {
      throw Error(ErrorCode::kDimensionMismatch, "feature count differs from training data");
    }
    return dummy_predict(model.spec.family, std::get<DummyParams>(model.state).prior,
                         model.spec.seed, x.rows());
  }
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(model, x.row(i));
  return out;
}

std::vector<int> dummy_predict(Family kind, double prior, std::uint64_t seed, std::size_t n) {
  if (!is_dummy(kind)) throw Error(ErrorCode::kInvalidArgument, "not a dummy family");
  if (!(prior >= 0.0 && prior <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prior must lie in [0, 1]");
  }
  Rng rng(derive_seed(seed, dummy_tag(kind)));
  std::vector<int> out(n);
  for (auto& v : out) v = rng.bernoulli(prior) ? 1 : 0;
  return out;
}

double log_loss(std::span<const double> scores, std::span<const int> y) {
  double acc = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double m = y[i] == 1 ? scores[i] : -scores[i];
    acc += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  return acc / static_cast<double>(y.size());
}

}  // namespace clinicl
