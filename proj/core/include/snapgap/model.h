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

#ifndef SNAPGAP_MODEL_H_
#define SNAPGAP_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "snapgap/feature_matrix.h"
#include "snapgap/logistic.h"
#include "snapgap/trees.h"

namespace snapgap {

enum class ModelFamily { kLogistic, kRandomForest, kGradientBoosting };

std::string_view FamilyName(ModelFamily family);
std::optional<ModelFamily> ParseFamily(std::string_view name);

// Union of the tunable knobs of all families; each family reads its own.
struct Hyperparameters {
  double c = 1.0;
  int n_trees = 100;
  int max_depth = 0;  // 0 means unlimited
  int min_leaf = 1;
  double learning_rate = 0.1;

  bool operator==(const Hyperparameters&) const = default;
};

struct ModelSpec {
  ModelFamily family = ModelFamily::kLogistic;
  Hyperparameters hyper;
  ClassWeighting weighting = ClassWeighting::kBalanced;
};

using FittedModel = std::variant<LogisticModel, TreeEnsembleModel>;

FittedModel FitModel(const ModelSpec& spec, const FeatureMatrix& x,
                     std::span<const int> labels, std::uint64_t seed, int threads = 1);

// Probabilities in [0, 1]. Throws kFeatureMismatch.
std::vector<double> PredictProba(const FittedModel& model, const FeatureMatrix& x);

ModelFamily FamilyOf(const FittedModel& model);
const std::vector<std::string>& FeatureNames(const FittedModel& model);

// Strict weak order from simplest to most complex: lower C; fewer, then
// shallower trees; lower learning rate.
bool SimplerThan(ModelFamily family, const Hyperparameters& a, const Hyperparameters& b);

// Coarse default search grids, in simplicity order.
std::vector<Hyperparameters> DefaultGrid(ModelFamily family);

std::string DescribeHyperparameters(ModelFamily family, const Hyperparameters& h);

}  // namespace snapgap

#endif  // SNAPGAP_MODEL_H_
