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

#ifndef SNAPGAP_SCORER_H_
#define SNAPGAP_SCORER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "snapgap/calibration.h"
#include "snapgap/model.h"

namespace snapgap {

// A fitted model, the optional isotonic map learned on its out-of-fold
// scores, and the rule that turns calibrated probabilities into flags.
struct CalibratedScorer {
  FittedModel model;
  Hyperparameters hyper;
  std::optional<IsotonicMap> calibration;
  DecisionRule rule;
  std::uint64_t root_seed = 0;

  std::vector<double> RawScores(const FeatureMatrix& x) const;
  // Raw scores passed through the isotonic map when one is present.
  std::vector<double> Probabilities(const FeatureMatrix& x) const;
  std::vector<int> Decisions(const FeatureMatrix& x) const;
};

}  // namespace snapgap

#endif  // SNAPGAP_SCORER_H_
