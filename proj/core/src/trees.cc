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

#include <algorithm>
#include <cmath>
#include <functional>

#include "snapgap/error.h"
#include "snapgap/parallel.h"
#include "snapgap/random.h"

namespace snapgap {
namespace {

// Sufficient statistics of one row. Gini: (weight * y, weight).
// Newton: (gradient, hessian).
struct RowStat {
  double a = 0.0;
  double b = 0.0;
};

enum class Criterion { kGini, kNewton };

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const RowStat> stats, Criterion criterion,
              const TreeParams& params, int max_features, RandomEngine& rng)
      : x_(x),
        stats_(stats),
        criterion_(criterion),
        params_(params),
        max_features_(max_features),
        rng_(rng) {}

  DecisionTree Build(std::vector<std::size_t> rows) {
    DecisionTree tree;
    Grow(rows, 0, tree);
    return tree;
  }

 private:
  double Score(double a, double b) const {
    if (criterion_ == Criterion::kGini) {
      return b > 0.0 ? (a * a + (b - a) * (b - a)) / b : 0.0;
    }
    return a * a / (b + params_.leaf_l2);
  }

  double LeafValue(double a, double b) const {
    if (criterion_ == Criterion::kGini) return b > 0.0 ? a / b : 0.0;
    return -a / (b + params_.leaf_l2);
  }

  std::vector<std::size_t> CandidateFeatures() {
    std::vector<std::size_t> features(x_.cols());
    for (std::size_t f = 0; f < features.size(); ++f) features[f] = f;
    const auto k = static_cast<std::size_t>(max_features_);
    if (k < features.size()) {
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + UniformIndex(rng_, features.size() - i);
        std::swap(features[i], features[j]);
      }
      features.resize(k);
      std::sort(features.begin(), features.end());
    }
    return features;
  }

  int Grow(std::vector<std::size_t>& rows, int depth, DecisionTree& tree) {
    double a = 0.0, b = 0.0;
    for (std::size_t r : rows) {
      a += stats_[r].a;
      b += stats_[r].b;
    }
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{.value = LeafValue(a, b)});

    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
    if (params_.max_depth > 0 && depth >= params_.max_depth) return index;
    if (rows.size() < 2 * min_leaf) return index;
    if (criterion_ == Criterion::kGini && (a <= 0.0 || a >= b)) return index;

    const double parent = Score(a, b);
    double best_gain = 1e-12 * std::max(1.0, std::abs(parent));
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, std::size_t>> sorted(rows.size());
    for (std::size_t f : CandidateFeatures()) {
      for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {x_(rows[i], f), rows[i]};
      std::sort(sorted.begin(), sorted.end());
      double la = 0.0, lb = 0.0;
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        la += stats_[sorted[i - 1].second].a;
        lb += stats_[sorted[i - 1].second].b;
        if (i < min_leaf || sorted.size() - i < min_leaf) continue;
        const double lo = sorted[i - 1].first;
        const double hi = sorted[i].first;
        if (!(lo < hi)) continue;
        const double gain = Score(la, lb) + Score(a - la, b - lb) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return index;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x_(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = Grow(left, depth + 1, tree);
    const int r = Grow(right, depth + 1, tree);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  const FeatureMatrix& x_;
  std::span<const RowStat> stats_;
  Criterion criterion_;
  const TreeParams& params_;
  int max_features_;
  RandomEngine& rng_;
};

void Validate(EnsembleKind kind, const FeatureMatrix& x, std::span<const int> labels,
              const TreeParams& p) {
  if (p.n_trees < 1 || p.max_depth < 0 || p.min_leaf < 1 || p.max_features < 0 ||
      static_cast<std::size_t>(p.max_features) > x.cols() || p.leaf_l2 < 0.0) {
    throw Error(ErrorKind::kInvalidParams, "tree ensemble parameters out of range");
  }
  if (kind == EnsembleKind::kGradientBoosting &&
      !(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) {
    throw Error(ErrorKind::kInvalidParams, "learning rate must lie in (0, 1]");
  }
  if (x.rows() != labels.size()) {
    throw Error(ErrorKind::kFeatureMismatch, "row count differs from label count");
  }
  std::size_t pos = 0;
  for (int y : labels) pos += (y == 1);
  if (pos == 0 || pos == labels.size()) {
    throw Error(ErrorKind::kSingleClass, "labels contain only one class");
  }
}

}  // namespace

double DecisionTree::Predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold
                                     ? n.left
                                     : n.right);
  }
  return nodes[i].value;
}

int DecisionTree::Depth() const {
  std::function<int(int)> depth = [&](int i) -> int {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth(n.left), depth(n.right));
  };
  return nodes.empty() ? 0 : depth(0);
}

TreeEnsembleModel FitTreeEnsemble(EnsembleKind kind, const FeatureMatrix& x,
                                  std::span<const int> labels, const TreeParams& params,
                                  int threads) {
  Validate(kind, x, labels, params);
  TreeEnsembleModel model;
  model.kind = kind;
  model.params = params;
  model.feature_names = x.names();
  const std::size_t n = x.rows();
  const std::vector<double> weights = ClassWeights(labels, params.weighting);

  if (kind == EnsembleKind::kRandomForest) {
    const int max_features =
        params.max_features > 0
            ? params.max_features
            : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    model.trees.resize(static_cast<std::size_t>(params.n_trees));
    ParallelFor(model.trees.size(), threads, [&](std::size_t t) {
      RandomEngine rng(DeriveSeed(params.seed, "tree", t));
      std::vector<unsigned> counts(n, 0);
      for (std::size_t i = 0; i < n; ++i) ++counts[UniformIndex(rng, n)];
      std::vector<RowStat> stats(n);
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] == 0) continue;
        const double w = weights[i] * counts[i];
        stats[i] = {w * labels[i], w};
        rows.push_back(i);
      }
      TreeBuilder builder(x, stats, Criterion::kGini, params, max_features, rng);
      model.trees[t] = builder.Build(std::move(rows));
    });
    return model;
  }

  double w_pos = 0.0, w_neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) (labels[i] == 1 ? w_pos : w_neg) += weights[i];
  model.base_score = std::log(w_pos / w_neg);
  const int max_features =
      params.max_features > 0 ? params.max_features : static_cast<int>(x.cols());
  RandomEngine rng(DeriveSeed(params.seed, "boost"));
  std::vector<double> margin(n, model.base_score);
  std::vector<RowStat> stats(n);
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(margin[i]);
      stats[i] = {weights[i] * (p - labels[i]), weights[i] * p * (1.0 - p)};
    }
    TreeBuilder builder(x, stats, Criterion::kNewton, params, max_features, rng);
    DecisionTree tree = builder.Build(all_rows);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += params.learning_rate * tree.Predict(x.Row(i));
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::vector<double> TreeEnsembleModel::PredictProba(const FeatureMatrix& x) const {
  if (x.cols() != feature_names.size()) {
    throw Error(ErrorKind::kFeatureMismatch,
                "model has " + std::to_string(feature_names.size()) + " features, input " +
                    std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.Row(i);
    double sum = 0.0;
    for (const DecisionTree& tree : trees) sum += tree.Predict(row);
    if (kind == EnsembleKind::kRandomForest) {
      out[i] = trees.empty() ? 0.5 : std::clamp(sum / trees.size(), 0.0, 1.0);
    } else {
      out[i] = Sigmoid(base_score + params.learning_rate * sum);
    }
  }
  return out;
}

}  // namespace snapgap
