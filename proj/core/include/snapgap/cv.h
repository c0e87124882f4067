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

#ifndef SNAPGAP_CV_H_
#define SNAPGAP_CV_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snapgap/feature_matrix.h"
#include "snapgap/model.h"

namespace snapgap {

// Fold id in [0, folds) per row. Each class is shuffled with the seed and
// dealt round-robin, so per-fold class counts differ by at most one.
// Throws kInvalidParams for folds < 2 and kTooFewPositives when a class has
// fewer members than folds.
std::vector<int> StratifiedFolds(std::span<const int> labels, int folds, std::uint64_t seed);

struct GridEntry {
  Hyperparameters hyper;
  double mean_ap = 0.0;
  std::vector<double> fold_aps;
};

struct CvGridResult {
  ModelFamily family = ModelFamily::kLogistic;
  std::vector<GridEntry> grid;  // in simplicity order
  Hyperparameters winner;
  std::size_t winner_index = 0;
  int folds = 0;
  std::vector<int> fold_of;  // per training row
  // Out-of-fold probabilities of the winning grid point, per training row.
  std::vector<double> oof_scores;
};

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  ClassWeighting weighting = ClassWeighting::kBalanced;
  int threads = 1;
};

// Winner maximizes mean validation AP; among equal means the simplest grid
// point wins. Every (grid point, fold) fit runs as an independent task.
CvGridResult CvGridSearch(ModelFamily family, const FeatureMatrix& x,
                          std::span<const int> labels,
                          std::vector<Hyperparameters> grid, const CvOptions& options);

}  // namespace snapgap

#endif  // SNAPGAP_CV_H_
