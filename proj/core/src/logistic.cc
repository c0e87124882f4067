/*
 * Copyright 2026 The snapgap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "snapgap/logistic.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "snapgap/error.h"

namespace snapgap {
namespace {

double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void RequireBothClasses(std::span<const int> labels) {
  std::size_t pos = 0;
  for (int y : labels) pos += (y == 1);
  if (pos == 0 || pos == labels.size()) {
    throw Error(ErrorKind::kSingleClass, "labels contain only one class");
  }
}

double Norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> ClassWeights(std::span<const int> labels, ClassWeighting weighting) {
  std::vector<double> w(labels.size(), 1.0);
  if (weighting == ClassWeighting::kNone) return w;
  std::size_t pos = 0;
  for (int y : labels) pos += (y == 1);
  const double n = static_cast<double>(labels.size());
  const std::size_t neg = labels.size() - pos;
  const double w_pos = pos ? n / (2.0 * pos) : 0.0;
  const double w_neg = neg ? n / (2.0 * neg) : 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] == 1 ? w_pos : w_neg;
  return w;
}

LogisticObjective::LogisticObjective(const FeatureMatrix& x, std::span<const int> labels,
                                     std::span<const double> weights, double c)
    : x_(x), labels_(labels), weights_(weights), c_(c) {}

double LogisticObjective::Value(std::span<const double> params) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < x_.rows(); ++i) {
    double z = params[0];
    const auto row = x_.Row(i);
    for (std::size_t j = 0; j < row.size(); ++j) z += params[j + 1] * row[j];
    loss += weights_[i] * (Softplus(z) - labels_[i] * z);
  }
  double penalty = 0.0;
  for (std::size_t j = 1; j < params.size(); ++j) penalty += params[j] * params[j];
  return loss + penalty / (2.0 * c_);
}

std::vector<double> LogisticObjective::Gradient(std::span<const double> params) const {
  std::vector<double> g(dimension(), 0.0);
  for (std::size_t i = 0; i < x_.rows(); ++i) {
    double z = params[0];
    const auto row = x_.Row(i);
    for (std::size_t j = 0; j < row.size(); ++j) z += params[j + 1] * row[j];
    const double r = weights_[i] * (Sigmoid(z) - labels_[i]);
    g[0] += r;
    for (std::size_t j = 0; j < row.size(); ++j) g[j + 1] += r * row[j];
  }
  for (std::size_t j = 1; j < params.size(); ++j) g[j] += params[j] / c_;
  return g;
}

std::vector<double> LogisticObjective::Hessian(std::span<const double> params) const {
  const std::size_t k = dimension();
  std::vector<double> h(k * k, 0.0);
  std::vector<double> xt(k);
  for (std::size_t i = 0; i < x_.rows(); ++i) {
    const auto row = x_.Row(i);
    xt[0] = 1.0;
    double z = params[0];
    for (std::size_t j = 0; j < row.size(); ++j) {
      xt[j + 1] = row[j];
      z += params[j + 1] * row[j];
    }
    const double p = Sigmoid(z);
    const double s = weights_[i] * p * (1.0 - p);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b <= a; ++b) h[a * k + b] += s * xt[a] * xt[b];
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) h[a * k + b] = h[b * k + a];
  }
  for (std::size_t j = 1; j < k; ++j) h[j * k + j] += 1.0 / c_;
  return h;
}

LogisticModel FitLogistic(const FeatureMatrix& x, std::span<const int> labels,
                          const LogisticParams& params) {
  if (!(params.c > 0.0) || params.max_iterations < 1) {
    throw Error(ErrorKind::kInvalidParams, "C must be positive");
  }
  if (x.rows() != labels.size()) {
    throw Error(ErrorKind::kFeatureMismatch, "row count differs from label count");
  }
  RequireBothClasses(labels);

  LogisticModel model;
  model.feature_names = x.names();
  model.params = params;
  FeatureMatrix design = x;
  if (params.standardize) {
    auto s = Standardize(x);
    design = std::move(s.matrix);
    model.standardization = std::move(s.standardization);
  }

  const std::vector<double> weights = ClassWeights(labels, params.weighting);
  const LogisticObjective objective(design, labels, weights, params.c);
  const std::size_t k = objective.dimension();

  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  // Tolerance applies to the gradient of the per-unit-weight objective.
  const double scale = std::max(1.0, total_weight);
  const double tolerance = params.gradient_tolerance * scale;

  std::vector<double> theta(k, 0.0);
  double value = objective.Value(theta);
  std::vector<double> grad = objective.Gradient(theta);
  int iter = 0;
  for (; iter < params.max_iterations && Norm(grad) > tolerance; ++iter) {
    const std::vector<double> h = objective.Hessian(theta);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        hessian(h.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    Eigen::Map<const Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(k));
    const Eigen::VectorXd step = hessian.ldlt().solve(-g);
    const double slope = g.dot(step);

    // Decreases below the rounding level of the objective count as
    // progress, so tiny backtracked steps are never accepted near the optimum.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(value));
    double t = 1.0;
    std::vector<double> candidate(k);
    double candidate_value = value;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < k; ++j) candidate[j] = theta[j] + t * step[j];
      candidate_value = objective.Value(candidate);
      if (candidate_value <= value + 1e-4 * t * slope + slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Near the optimum the objective is flat to rounding; take the full
      // Newton step and let the gradient decide convergence.
      for (std::size_t j = 0; j < k; ++j) candidate[j] = theta[j] + step[j];
      candidate_value = objective.Value(candidate);
    }
    theta = candidate;
    value = candidate_value;
    grad = objective.Gradient(theta);
  }
  model.iterations = iter;
  model.gradient_norm = Norm(grad) / scale;
  if (!(model.gradient_norm <= params.gradient_tolerance)) {
    std::ostringstream msg;
    msg << "gradient norm " << model.gradient_norm << " after " << iter << " iterations";
    throw Error(ErrorKind::kNonConvergence, msg.str());
  }
  model.intercept = theta[0];
  model.coefficients.assign(theta.begin() + 1, theta.end());
  return model;
}

std::vector<double> LogisticModel::PredictProba(const FeatureMatrix& x) const {
  if (x.cols() != coefficients.size()) {
    throw Error(ErrorKind::kFeatureMismatch,
                "model has " + std::to_string(coefficients.size()) + " features, input " +
                    std::to_string(x.cols()));
  }
  const FeatureMatrix design = standardization.empty() ? x : standardization.Apply(x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = intercept;
    const auto row = design.Row(i);
    for (std::size_t j = 0; j < row.size(); ++j) z += coefficients[j] * row[j];
    out[i] = Sigmoid(z);
  }
  return out;
}

}  // namespace snapgap
