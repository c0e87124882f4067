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

#include "snapgap/trees.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "snapgap/error.h"
#include "snapgap/logistic.h"
#include "snapgap/metrics.h"
#include "snapgap/model.h"

namespace snapgap {
namespace {

TreeParams Params(int n_trees, int depth, std::uint64_t seed = 1) {
  TreeParams p;
  p.n_trees = n_trees;
  p.max_depth = depth;
  p.seed = seed;
  return p;
}

struct Xor {
  FeatureMatrix x;
  std::vector<int> y;
};

Xor XorPanel(testing::Rng& rng, int per_cluster) {
  std::vector<std::vector<double>> rows;
  Xor out;
  const double centers[4][2] = {{-1, -1}, {1, 1}, {-1, 1}, {1, -1}};
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < per_cluster; ++i) {
      rows.push_back({centers[c][0] + testing::Uniform(rng, -0.3, 0.3),
                      centers[c][1] + testing::Uniform(rng, -0.3, 0.3)});
      out.y.push_back(c < 2 ? 1 : 0);
    }
  }
  out.x = FeatureMatrix::FromRows(rows);
  return out;
}

TEST(Trees, SingleSplitSeparatesPerfectly) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = -5; i <= 5; ++i) {
    if (i == 0) continue;
    rows.push_back({static_cast<double>(i)});
    y.push_back(i > 0);
  }
  const FeatureMatrix x = FeatureMatrix::FromRows(rows);
  const auto model = FitTreeEnsemble(EnsembleKind::kRandomForest, x, y, Params(1, 1));
  ASSERT_EQ(model.trees.size(), 1u);
  EXPECT_EQ(model.trees[0].Depth(), 1);
  const auto p = model.PredictProba(x);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(p[i], y[i] ? 1.0 : 0.0);
}

TEST(Trees, EmptyBoostingPredictsBaseRate) {
  const FeatureMatrix x = FeatureMatrix::FromRows({{0}, {1}, {2}, {3}});
  const std::vector<int> y = {0, 0, 0, 1};
  TreeParams p = Params(5, 2);
  p.weighting = ClassWeighting::kNone;
  auto model = FitTreeEnsemble(EnsembleKind::kGradientBoosting, x, y, p);
  EXPECT_NEAR(Sigmoid(model.base_score), 0.25, 1e-12);
  model.trees.clear();
  for (double v : model.PredictProba(x)) EXPECT_NEAR(v, 0.25, 1e-12);
}

TEST(Trees, SameSeedSameEnsembleAnyThreadCount) {
  testing::Rng rng(3);
  const Xor data = XorPanel(rng, 25);
  for (auto kind : {EnsembleKind::kRandomForest, EnsembleKind::kGradientBoosting}) {
    const auto a = FitTreeEnsemble(kind, data.x, data.y, Params(20, 3, 9));
    const auto b = FitTreeEnsemble(kind, data.x, data.y, Params(20, 3, 9), 4);
    EXPECT_EQ(a.trees, b.trees);
    EXPECT_EQ(a.PredictProba(data.x), b.PredictProba(data.x));
    const auto c = FitTreeEnsemble(kind, data.x, data.y, Params(20, 3, 10));
    if (kind == EnsembleKind::kRandomForest) {
      EXPECT_NE(a.trees, c.trees);
    }
  }
}

TEST(Trees, MoreTreesKeepEarlierTrees) {
  testing::Rng rng(4);
  const Xor data = XorPanel(rng, 20);
  const auto small = FitTreeEnsemble(EnsembleKind::kRandomForest, data.x, data.y, Params(5, 3));
  const auto large = FitTreeEnsemble(EnsembleKind::kRandomForest, data.x, data.y, Params(12, 3));
  for (std::size_t t = 0; t < small.trees.size(); ++t) EXPECT_EQ(small.trees[t], large.trees[t]);
}

TEST(Trees, XorForestBeatsLogistic) {
  testing::Rng rng(5);
  const Xor data = XorPanel(rng, 30);
  const auto forest = FitTreeEnsemble(EnsembleKind::kRandomForest, data.x, data.y, Params(50, 0));
  const auto logistic = FitLogistic(data.x, data.y, LogisticParams{});
  const double forest_auc = RocAuc(forest.PredictProba(data.x), data.y);
  const double logistic_auc = RocAuc(logistic.PredictProba(data.x), data.y);
  EXPECT_GT(forest_auc, logistic_auc);
  EXPECT_GT(forest_auc, 0.95);
}

TEST(Trees, ProbabilitiesInUnitInterval) {
  testing::Rng rng(6);
  const Xor data = XorPanel(rng, 15);
  FeatureMatrix probe(200, 2);
  for (std::size_t i = 0; i < 200; ++i) {
    probe(i, 0) = testing::Uniform(rng, -5, 5);
    probe(i, 1) = testing::Uniform(rng, -5, 5);
  }
  for (auto kind : {EnsembleKind::kRandomForest, EnsembleKind::kGradientBoosting}) {
    for (double p : FitTreeEnsemble(kind, data.x, data.y, Params(30, 4)).PredictProba(probe)) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Trees, TiesGoToLowestFeatureIndex) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 12; ++i) {
    rows.push_back({static_cast<double>(i), static_cast<double>(i), static_cast<double>(i)});
    y.push_back(i >= 6);
  }
  TreeParams p = Params(3, 1);
  p.max_features = 3;
  const auto model =
      FitTreeEnsemble(EnsembleKind::kGradientBoosting, FeatureMatrix::FromRows(rows), y, p);
  for (const auto& tree : model.trees) EXPECT_EQ(tree.nodes[0].feature, 0);
}

TEST(Trees, NodeIndicesValid) {
  testing::Rng rng(8);
  const Xor data = XorPanel(rng, 20);
  for (auto kind : {EnsembleKind::kRandomForest, EnsembleKind::kGradientBoosting}) {
    const auto model = FitTreeEnsemble(kind, data.x, data.y, Params(10, 0));
    for (const auto& tree : model.trees) {
      for (const auto& node : tree.nodes) {
        EXPECT_TRUE(std::isfinite(node.value));
        if (node.feature < 0) continue;
        EXPECT_LT(node.feature, 2);
        EXPECT_GT(node.left, 0);
        EXPECT_LT(static_cast<std::size_t>(node.right), tree.nodes.size());
      }
    }
  }
}

TEST(Trees, MinLeafRespected) {
  testing::Rng rng(9);
  const Xor data = XorPanel(rng, 20);
  TreeParams p = Params(1, 0);
  p.min_leaf = 15;
  p.weighting = ClassWeighting::kNone;
  const auto model = FitTreeEnsemble(EnsembleKind::kGradientBoosting, data.x, data.y, p);
  std::map<int, int> leaf_counts;
  const auto& tree = model.trees[0];
  for (std::size_t i = 0; i < data.x.rows(); ++i) {
    int n = 0;
    while (tree.nodes[n].feature >= 0) {
      n = data.x(i, tree.nodes[n].feature) <= tree.nodes[n].threshold ? tree.nodes[n].left
                                                                       : tree.nodes[n].right;
    }
    ++leaf_counts[n];
  }
  for (const auto& [leaf, count] : leaf_counts) EXPECT_GE(count, 15);
}

TEST(Trees, Errors) {
  const FeatureMatrix x = FeatureMatrix::FromRows({{0}, {1}});
  try {
    FitTreeEnsemble(EnsembleKind::kRandomForest, x, std::vector<int>{1, 1}, Params(2, 1));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingleClass);
  }
  try {
    FitTreeEnsemble(EnsembleKind::kRandomForest, x, std::vector<int>{0, 1}, Params(0, 1));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidParams);
  }
  TreeParams lr = Params(2, 1);
  lr.learning_rate = 0.0;
  EXPECT_THROW(FitTreeEnsemble(EnsembleKind::kGradientBoosting, x, std::vector<int>{0, 1}, lr),
               Error);
  const auto model =
      FitTreeEnsemble(EnsembleKind::kRandomForest, x, std::vector<int>{0, 1}, Params(2, 1));
  EXPECT_THROW(model.PredictProba(FeatureMatrix(1, 2)), Error);
}

TEST(Model, FamiliesAndGrids) {
  EXPECT_EQ(ParseFamily("logistic"), ModelFamily::kLogistic);
  EXPECT_EQ(ParseFamily(FamilyName(ModelFamily::kGradientBoosting)),
            ModelFamily::kGradientBoosting);
  EXPECT_FALSE(ParseFamily("svm").has_value());

  const auto logistic = DefaultGrid(ModelFamily::kLogistic);
  ASSERT_EQ(logistic.size(), 5u);
  const double cs[] = {0.01, 0.1, 1, 10, 100};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(logistic[i].c, cs[i]);
  EXPECT_EQ(DefaultGrid(ModelFamily::kRandomForest).size(), 6u);
  EXPECT_EQ(DefaultGrid(ModelFamily::kGradientBoosting).size(), 8u);
  for (auto family : {ModelFamily::kLogistic, ModelFamily::kRandomForest,
                      ModelFamily::kGradientBoosting}) {
    const auto grid = DefaultGrid(family);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      EXPECT_TRUE(SimplerThan(family, grid[i - 1], grid[i]));
      EXPECT_FALSE(SimplerThan(family, grid[i], grid[i - 1]));
    }
  }
  bool unlimited = false;
  for (const auto& h : DefaultGrid(ModelFamily::kRandomForest)) {
    if (h.max_depth == 0) unlimited = h.min_leaf == 5;
  }
  EXPECT_TRUE(unlimited);
}

}  // namespace
}  // namespace snapgap
