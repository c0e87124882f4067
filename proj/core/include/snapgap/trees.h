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

#ifndef SNAPGAP_TREES_H_
#define SNAPGAP_TREES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snapgap/feature_matrix.h"
#include "snapgap/logistic.h"

namespace snapgap {

// A leaf has feature == -1. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> row) const;
  int Depth() const;

  bool operator==(const DecisionTree&) const = default;
};

enum class EnsembleKind { kRandomForest, kGradientBoosting };

struct TreeParams {
  int n_trees = 100;
  int max_depth = 0;  // 0 means unlimited
  int min_leaf = 1;
  double learning_rate = 0.1;  // boosting only
  // Features examined per split; 0 picks floor(sqrt(d)) for forests and all
  // features for boosting.
  int max_features = 0;
  ClassWeighting weighting = ClassWeighting::kBalanced;
  double leaf_l2 = 1.0;  // boosting leaf regularization
  std::uint64_t seed = 0;

  bool operator==(const TreeParams&) const = default;
};

struct TreeEnsembleModel {
  EnsembleKind kind = EnsembleKind::kRandomForest;
  TreeParams params;
  std::vector<DecisionTree> trees;
  // Boosting: initial log-odds of the weighted base rate.
  double base_score = 0.0;
  std::vector<std::string> feature_names;

  // Forest: mean of leaf class fractions. Boosting: sigmoid of base_score plus
  // learning_rate times the summed leaf scores.
  std::vector<double> PredictProba(const FeatureMatrix& x) const;
};

// Forests draw a bootstrap sample per tree and grow CART trees on weighted
// Gini; boosting fits Newton-step regression trees to log-loss gradients.
// Split ties go to the lowest feature index, then the lowest threshold.
// Throws kInvalidParams or kSingleClass.
TreeEnsembleModel FitTreeEnsemble(EnsembleKind kind, const FeatureMatrix& x,
                                  std::span<const int> labels, const TreeParams& params,
                                  int threads = 1);

}  // namespace snapgap

#endif  // SNAPGAP_TREES_H_
