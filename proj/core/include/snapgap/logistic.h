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

#ifndef SNAPGAP_LOGISTIC_H_
#define SNAPGAP_LOGISTIC_H_

#include <span>
#include <string>
#include <vector>

#include "snapgap/feature_matrix.h"

namespace snapgap {

enum class ClassWeighting { kNone, kBalanced };

// Per-row weights: 1 for kNone; n / (2 n_c) for class c under kBalanced.
std::vector<double> ClassWeights(std::span<const int> labels, ClassWeighting weighting);

struct LogisticParams {
  // Inverse L2 strength; the penalty is ||w||^2 / (2 C). Intercept is free.
  double c = 1.0;
  ClassWeighting weighting = ClassWeighting::kBalanced;
  bool standardize = true;
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
};

struct LogisticModel {
  std::vector<std::string> feature_names;
  Standardization standardization;  // empty when params.standardize is off
  std::vector<double> coefficients;  // on the standardized scale
  double intercept = 0.0;
  LogisticParams params;
  int iterations = 0;
  double gradient_norm = 0.0;

  // Throws kFeatureMismatch for a different column count.
  std::vector<double> PredictProba(const FeatureMatrix& x) const;
};

// Weighted penalized negative log-likelihood
//   sum_i w_i [log(1 + e^{z_i}) - y_i z_i] + ||beta||^2 / (2 C),
//   z_i = b + x_i . beta,
// over a design that is already transformed. Parameters are laid out as
// [b, beta_1, ..., beta_d].
class LogisticObjective {
 public:
  LogisticObjective(const FeatureMatrix& x, std::span<const int> labels,
                    std::span<const double> weights, double c);

  double Value(std::span<const double> params) const;
  std::vector<double> Gradient(std::span<const double> params) const;
  // Row-major (d+1) x (d+1).
  std::vector<double> Hessian(std::span<const double> params) const;

  std::size_t dimension() const { return x_.cols() + 1; }

 private:
  const FeatureMatrix& x_;
  std::span<const int> labels_;
  std::span<const double> weights_;
  double c_;
};

// Damped Newton iterations until the gradient norm, divided by the total
// sample weight, falls below the tolerance. Throws kSingleClass,
// kInvalidParams, or kNonConvergence with the final gradient norm.
LogisticModel FitLogistic(const FeatureMatrix& x, std::span<const int> labels,
                          const LogisticParams& params);

double Sigmoid(double z);

}  // namespace snapgap

#endif  // SNAPGAP_LOGISTIC_H_
