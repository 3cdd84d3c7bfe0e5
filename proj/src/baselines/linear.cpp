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

// Standardized linear models: l1/l2 logistic regression and a Pegasos
// linear SVM.

#include <cmath>
#include <numeric>

#include "baselines/internal.hpp"
#include "clinicl/common/error.hpp"

namespace clinicl::internal {
namespace {

constexpr std::size_t kMaxIterations = 10000;
constexpr double kRelativeTolerance = 1e-8;

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  if (margin > 0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

// sigma(-m) = 1 / (1 + exp(m)).
double sigmoid_neg(double margin) {
  if (margin > 0) {
    const double e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

struct Standardized {
  Matrix z;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> sign;  // labels as -1/+1
};

Standardized standardize(const Matrix& x, std::span<const int> y) {
  Standardized s;
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  for (std::size_t f = 0; f < p; ++f) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += x(i, f);
    const double mu = sum / static_cast<double>(n);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += (x(i, f) - mu) * (x(i, f) - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[f] = mu;
    s.scale[f] = sd > 0 ? sd : 1.0;
  }
  s.z = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < p; ++f) {
      // Constant columns become exactly zero.
      s.z(i, f) = (x(i, f) - s.mean[f]) / s.scale[f];
    }
  }
  for (const int label : y) s.sign.push_back(label == 1 ? 1.0 : -1.0);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Mean logistic loss and its gradient in (w, b).
double smooth_loss(const Standardized& s, const std::vector<double>& w, double b,
                   std::vector<double>* grad_w, double* grad_b) {
  const std::size_t n = s.z.rows();
  const std::size_t p = s.z.cols();
  double loss = 0;
  if (grad_w) grad_w->assign(p, 0.0);
  if (grad_b) *grad_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = s.z.row(i);
    const double m = s.sign[i] * (dot(w, zi) + b);
    loss += logistic_loss(m);
    if (grad_w) {
      const double coef = -s.sign[i] * sigmoid_neg(m);
      for (std::size_t f = 0; f < p; ++f) (*grad_w)[f] += coef * zi[f];
      *grad_b += coef;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad_w) {
    for (double& g : *grad_w) g *= inv_n;
    *grad_b *= inv_n;
  }
  return loss * inv_n;
}

double l1_norm(const std::vector<double>& w) {
  double acc = 0;
  for (const double v : w) acc += std::abs(v);
  return acc;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

bool converged_step(double previous, double current) {
  return std::abs(previous - current) <= kRelativeTolerance * std::max(std::abs(previous), 1e-300);
}

void finish_linear(LinearParams& lp, const Standardized& s, std::vector<double> w, double b) {
  lp.mean = s.mean;
  lp.scale = s.scale;
  lp.std_weights = std::move(w);
  lp.std_bias = b;
  lp.weights.resize(lp.std_weights.size());
  lp.bias = b;
  for (std::size_t f = 0; f < lp.std_weights.size(); ++f) {
    lp.weights[f] = lp.std_weights[f] / lp.scale[f];
    lp.bias -= lp.std_weights[f] * lp.mean[f] / lp.scale[f];
  }
}

}  // namespace

FitOutcome fit_logreg(const Matrix& x, std::span<const int> y, double c, bool l1) {
  if (!(c > 0)) throw Error(ErrorCode::kInvalidArgument, "LogReg C must be positive");
  const Standardized s = standardize(x, y);
  const std::size_t p = x.cols();
  const double lambda = 1.0 / (c * static_cast<double>(x.rows()));
  std::vector<double> w(p, 0.0), gw, trial(p);
  double b = 0.0, gb = 0.0;

  const auto penalty = [&](const std::vector<double>& v) {
    return l1 ? lambda * l1_norm(v) : 0.5 * lambda * dot(v, v);
  };

  FitOutcome out;
  LinearParams lp;
  double objective = smooth_loss(s, w, b, nullptr, nullptr) + penalty(w);
  lp.objective_trace.push_back(objective);
  double step = 1.0;
  bool converged = false;
  std::size_t it = 0;
  for (; it < kMaxIterations && !converged; ++it) {
    const double f = smooth_loss(s, w, b, &gw, &gb);
    if (!l1) {
      for (std::size_t k = 0; k < p; ++k) gw[k] += lambda * w[k];
    }
    step = std::min(step * 2.0, 1e6);
    double next = objective;
    double trial_b = b;
    while (true) {
      if (l1) {
        // Proximal gradient step; the bias is not penalised.
        double lin = 0, quad = 0;
        for (std::size_t k = 0; k < p; ++k) {
          trial[k] = soft_threshold(w[k] - step * gw[k], step * lambda);
          lin += gw[k] * (trial[k] - w[k]);
          quad += (trial[k] - w[k]) * (trial[k] - w[k]);
        }
        trial_b = b - step * gb;
        lin += gb * (trial_b - b);
        quad += (trial_b - b) * (trial_b - b);
        const double f_trial = smooth_loss(s, trial, trial_b, nullptr, nullptr);
        if (f_trial <= f + lin + quad / (2.0 * step) + 1e-15 || step < 1e-20) {
          next = f_trial + penalty(trial);
          break;
        }
      } else {
        double g2 = gb * gb;
        for (std::size_t k = 0; k < p; ++k) {
          trial[k] = w[k] - step * gw[k];
          g2 += gw[k] * gw[k];
        }
        trial_b = b - step * gb;
        const double value = smooth_loss(s, trial, trial_b, nullptr, nullptr) + penalty(trial);
        if (value <= objective - 0.5 * step * g2 || step < 1e-20) {
          next = value;
          break;
        }
      }
      step *= 0.5;
    }
    if (next > objective) {
      // Rounding noise at the optimum; keep the current iterate.
      converged = true;
      break;
    }
    w = trial;
    b = trial_b;
    converged = converged_step(objective, next);
    objective = next;
    lp.objective_trace.push_back(objective);
  }
  finish_linear(lp, s, std::move(w), b);
  out.importance.resize(p);
  for (std::size_t k = 0; k < p; ++k) out.importance[k] = std::abs(lp.std_weights[k]);
  out.state = std::move(lp);
  out.converged = converged;
  out.iterations = it;
  return out;
}

FitOutcome fit_linear_svm(const Matrix& x, std::span<const int> y, double c) {
  if (!(c > 0)) throw Error(ErrorCode::kInvalidArgument, "SVM C must be positive");
  const Standardized s = standardize(x, y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const double lambda = 1.0 / (c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  // Bias is an augmented, regularised constant feature.
  std::vector<double> w(p + 1, 0.0), grad(p + 1);

  const auto objective = [&](const std::vector<double>& v) {
    double hinge = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = dot(std::span<const double>(v.data(), p), s.z.row(i)) + v[p];
      hinge += std::max(0.0, 1.0 - s.sign[i] * f);
    }
    return 0.5 * lambda * dot(v, v) + hinge / static_cast<double>(n);
  };

  LinearParams lp;
  std::vector<double> best = w;
  double best_obj = objective(w);
  lp.objective_trace.push_back(best_obj);
  double checkpoint = best_obj;
  bool converged = false;
  std::size_t t = 1;
  for (; t <= kMaxIterations; ++t) {
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    for (std::size_t k = 0; k <= p; ++k) grad[k] = lambda * w[k];
    for (std::size_t i = 0; i < n; ++i) {
      const auto zi = s.z.row(i);
      const double f = dot(std::span<const double>(w.data(), p), zi) + w[p];
      if (s.sign[i] * f < 1.0) {
        const double coef = s.sign[i] / static_cast<double>(n);
        for (std::size_t k = 0; k < p; ++k) grad[k] -= coef * zi[k];
        grad[p] -= coef;
      }
    }
    for (std::size_t k = 0; k <= p; ++k) w[k] -= eta * grad[k];
    const double norm = std::sqrt(dot(w, w));
    if (norm > radius) {
      for (double& v : w) v *= radius / norm;
    }
    const double obj = objective(w);
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
    lp.objective_trace.push_back(best_obj);
    if (t % 100 == 0) {
      if (checkpoint - best_obj <= kRelativeTolerance * checkpoint) {
        converged = true;
        break;
      }
      checkpoint = best_obj;
    }
  }
  const double bias = best[p];
  best.resize(p);
  FitOutcome out;
  finish_linear(lp, s, best, bias);
  out.importance.resize(p);
  for (std::size_t k = 0; k < p; ++k) out.importance[k] = std::abs(lp.std_weights[k]);
  out.state = std::move(lp);
  out.converged = converged;
  out.iterations = std::min(t, kMaxIterations);
  return out;
}

}  // namespace clinicl::internal
