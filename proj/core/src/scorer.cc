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

#include "snapgap/scorer.h"

namespace snapgap {

std::vector<double> CalibratedScorer::RawScores(const FeatureMatrix& x) const {
  return PredictProba(model, x);
}

std::vector<double> CalibratedScorer::Probabilities(const FeatureMatrix& x) const {
  std::vector<double> scores = RawScores(x);
  if (calibration) return calibration->Apply(scores);
  return scores;
}

std::vector<int> CalibratedScorer::Decisions(const FeatureMatrix& x) const {
  return Classify(Probabilities(x), rule);
}

}  // namespace snapgap
