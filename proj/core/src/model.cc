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

#include "snapgap/model.h"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "snapgap/error.h"

namespace snapgap {

std::string_view FamilyName(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLogistic: return "logistic";
    case ModelFamily::kRandomForest: return "random_forest";
    case ModelFamily::kGradientBoosting: return "gradient_boosting";
  }
  return "logistic";
}

std::optional<ModelFamily> ParseFamily(std::string_view name) {
  for (auto f : {ModelFamily::kLogistic, ModelFamily::kRandomForest,
                 ModelFamily::kGradientBoosting}) {
    if (FamilyName(f) == name) return f;
  }
  return std::nullopt;
}

FittedModel FitModel(const ModelSpec& spec, const FeatureMatrix& x,
                     std::span<const int> labels, std::uint64_t seed, int threads) {
  if (spec.family == ModelFamily::kLogistic) {
    LogisticParams params;
    params.c = spec.hyper.c;
    params.weighting = spec.weighting;
    return FitLogistic(x, labels, params);
  }
  TreeParams params;
  params.n_trees = spec.hyper.n_trees;
  params.max_depth = spec.hyper.max_depth;
  params.min_leaf = spec.hyper.min_leaf;
  params.learning_rate = spec.hyper.learning_rate;
  params.weighting = spec.weighting;
  params.seed = seed;
  const auto kind = spec.family == ModelFamily::kRandomForest
                        ? EnsembleKind::kRandomForest
                        : EnsembleKind::kGradientBoosting;
  return FitTreeEnsemble(kind, x, labels, params, threads);
}

std::vector<double> PredictProba(const FittedModel& model, const FeatureMatrix& x) {
  return std::visit([&](const auto& m) { return m.PredictProba(x); }, model);
}

ModelFamily FamilyOf(const FittedModel& model) {
  if (std::holds_alternative<LogisticModel>(model)) return ModelFamily::kLogistic;
  return std::get<TreeEnsembleModel>(model).kind == EnsembleKind::kRandomForest
             ? ModelFamily::kRandomForest
             : ModelFamily::kGradientBoosting;
}

const std::vector<std::string>& FeatureNames(const FittedModel& model) {
  return std::visit(
      [](const auto& m) -> const std::vector<std::string>& { return m.feature_names; },
      model);
}

bool SimplerThan(ModelFamily family, const Hyperparameters& a, const Hyperparameters& b) {
  // Unlimited depth (0) ranks as deepest.
  auto depth = [](int d) { return d == 0 ? 1 << 30 : d; };
  switch (family) {
    case ModelFamily::kLogistic:
      return a.c < b.c;
    case ModelFamily::kRandomForest:
      return std::tuple(a.n_trees, depth(a.max_depth), -a.min_leaf) <
             std::tuple(b.n_trees, depth(b.max_depth), -b.min_leaf);
    case ModelFamily::kGradientBoosting:
      return std::tuple(a.n_trees, depth(a.max_depth), a.learning_rate) <
             std::tuple(b.n_trees, depth(b.max_depth), b.learning_rate);
  }
  return false;
}

std::vector<Hyperparameters> DefaultGrid(ModelFamily family) {
  std::vector<Hyperparameters> grid;
  switch (family) {
    case ModelFamily::kLogistic:
      for (double c : {0.01, 0.1, 1.0, 10.0, 100.0}) grid.push_back({.c = c});
      break;
    case ModelFamily::kRandomForest:
      for (int trees : {100, 300}) {
        grid.push_back({.n_trees = trees, .max_depth = 3});
        grid.push_back({.n_trees = trees, .max_depth = 5});
        grid.push_back({.n_trees = trees, .max_depth = 0, .min_leaf = 5});
      }
      break;
    case ModelFamily::kGradientBoosting:
      for (int trees : {100, 300}) {
        for (int depth : {2, 3}) {
          for (double lr : {0.05, 0.1}) {
            grid.push_back({.n_trees = trees, .max_depth = depth, .learning_rate = lr});
          }
        }
      }
      break;
  }
  std::stable_sort(grid.begin(), grid.end(), [&](const auto& a, const auto& b) {
    return SimplerThan(family, a, b);
  });
  return grid;
}

std::string DescribeHyperparameters(ModelFamily family, const Hyperparameters& h) {
  std::ostringstream out;
  switch (family) {
    case ModelFamily::kLogistic:
      out << "C=" << h.c;
      break;
    case ModelFamily::kRandomForest:
      out << "trees=" << h.n_trees << " depth="
          << (h.max_depth ? std::to_string(h.max_depth) : "none")
          << " min_leaf=" << h.min_leaf;
      break;
    case ModelFamily::kGradientBoosting:
      out << "trees=" << h.n_trees << " depth=" << h.max_depth << " lr=" << h.learning_rate;
      break;
  }
  return out.str();
}

}  // namespace snapgap
