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

#include "snapgap/cv.h"

#include <algorithm>

#include "snapgap/error.h"
#include "snapgap/metrics.h"
#include "snapgap/parallel.h"
#include "snapgap/random.h"

namespace snapgap {

std::vector<int> StratifiedFolds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::kInvalidParams, "need at least two folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  const std::size_t feasible = std::min(pos.size(), neg.size());
  if (feasible < static_cast<std::size_t>(folds)) {
    throw Error(ErrorKind::kTooFewPositives,
                std::to_string(pos.size()) + " positives and " + std::to_string(neg.size()) +
                    " negatives support at most " + std::to_string(feasible) + " folds, " +
                    std::to_string(folds) + " requested (minimum is 2)");
  }
  RandomEngine rng(DeriveSeed(seed, "folds"));
  Shuffle(pos, rng);
  Shuffle(neg, rng);
  std::vector<int> fold_of(labels.size(), 0);
  for (std::size_t k = 0; k < pos.size(); ++k) fold_of[pos[k]] = static_cast<int>(k % folds);
  for (std::size_t k = 0; k < neg.size(); ++k) fold_of[neg[k]] = static_cast<int>(k % folds);
  return fold_of;
}

CvGridResult CvGridSearch(ModelFamily family, const FeatureMatrix& x,
                          std::span<const int> labels, std::vector<Hyperparameters> grid,
                          const CvOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::kInvalidParams, "empty hyperparameter grid");
  if (x.rows() != labels.size()) {
    throw Error(ErrorKind::kFeatureMismatch, "row count differs from label count");
  }
  std::stable_sort(grid.begin(), grid.end(), [&](const auto& a, const auto& b) {
    return SimplerThan(family, a, b);
  });

  CvGridResult result;
  result.family = family;
  result.folds = options.folds;
  result.fold_of = StratifiedFolds(labels, options.folds, options.seed);

  const auto k = static_cast<std::size_t>(options.folds);
  std::vector<std::vector<std::size_t>> train_rows(k), valid_rows(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto f = static_cast<std::size_t>(result.fold_of[i]);
    valid_rows[f].push_back(i);
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_rows[g].push_back(i);
    }
  }
  std::vector<FeatureMatrix> train_x(k), valid_x(k);
  std::vector<std::vector<int>> train_y(k), valid_y(k);
  for (std::size_t f = 0; f < k; ++f) {
    train_x[f] = x.SelectRows(train_rows[f]);
    valid_x[f] = x.SelectRows(valid_rows[f]);
    for (std::size_t i : train_rows[f]) train_y[f].push_back(labels[i]);
    for (std::size_t i : valid_rows[f]) valid_y[f].push_back(labels[i]);
  }

  const std::uint64_t fit_seed = DeriveSeed(options.seed, "cv-fit");
  std::vector<std::vector<double>> fold_scores(grid.size() * k);
  std::vector<double> fold_ap(grid.size() * k);
  ParallelFor(grid.size() * k, options.threads, [&](std::size_t task) {
    const std::size_t g = task / k, f = task % k;
    const ModelSpec spec{family, grid[g], options.weighting};
    const FittedModel model = FitModel(spec, train_x[f], train_y[f], fit_seed);
    fold_scores[task] = PredictProba(model, valid_x[f]);
    fold_ap[task] = AveragePrecision(fold_scores[task], valid_y[f]);
  });

  for (std::size_t g = 0; g < grid.size(); ++g) {
    GridEntry entry;
    entry.hyper = grid[g];
    for (std::size_t f = 0; f < k; ++f) entry.fold_aps.push_back(fold_ap[g * k + f]);
    double sum = 0.0;
    for (double ap : entry.fold_aps) sum += ap;
    entry.mean_ap = sum / static_cast<double>(k);
    result.grid.push_back(std::move(entry));
  }
  for (std::size_t g = 1; g < result.grid.size(); ++g) {
    if (result.grid[g].mean_ap > result.grid[result.winner_index].mean_ap) {
      result.winner_index = g;
    }
  }
  result.winner = result.grid[result.winner_index].hyper;

  result.oof_scores.assign(labels.size(), 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    const auto& scores = fold_scores[result.winner_index * k + f];
    for (std::size_t i = 0; i < valid_rows[f].size(); ++i) {
      result.oof_scores[valid_rows[f][i]] = scores[i];
    }
  }
  return result;
}

}  // namespace snapgap
