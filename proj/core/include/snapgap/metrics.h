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

#ifndef SNAPGAP_METRICS_H_
#define SNAPGAP_METRICS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "snapgap/calibration.h"
#include "snapgap/feature_matrix.h"

namespace snapgap {

// Probability that a random positive outranks a random negative, ties
// counting one half. Throws kSingleClass.
double RocAuc(std::span<const double> scores, std::span<const int> labels);

// Step-interpolated average precision: sum over distinct score thresholds,
// taken in descending order, of (recall gain) x (precision at that
// threshold). Tied scores enter together as one threshold, so the result
// does not depend on input order. Throws kNoPositives.
double AveragePrecision(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t flagged = 0;
  double precision = 0.0;  // 0 when nothing is flagged
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

Confusion ConfusionAt(std::span<const double> probabilities, std::span<const int> labels,
                      const DecisionRule& rule);

// Precision among the top ceil(fraction * n) scores. Ties at the cut are
// resolved in favor of lower input indices. Throws kEmptyInput.
double PrecisionAtK(std::span<const double> scores, std::span<const int> labels,
                    double fraction);

inline constexpr std::array<double, 2> kPrecisionAtFractions = {0.01, 0.05};

struct EvalReport {
  std::string model;
  std::string cohort;
  std::size_t n = 0;
  std::size_t n_pos = 0;
  double auc = 0.0;
  double ap = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t flagged = 0;
  std::map<double, double> precision_at;  // keyed by list fraction
  DecisionRule rule;
};

EvalReport Evaluate(std::span<const double> probabilities, std::span<const int> labels,
                    const DecisionRule& rule, std::string model, std::string cohort);

enum class ImportanceMetric { kAuc, kAp };

struct FeatureImportance {
  std::string name;
  double delta_auc = 0.0;
  double delta_ap = 0.0;
  int repeats = 0;
  // Sample standard deviation of the per-repeat drops in the chosen metric.
  double dispersion = 0.0;
};

struct ImportanceReport {
  ImportanceMetric metric = ImportanceMetric::kAuc;
  std::vector<FeatureImportance> features;
};

using Scorer = std::function<std::vector<double>(const FeatureMatrix&)>;

// Mean drop in AUC and AP when one column is shuffled, per feature. Each
// (feature, repeat) permutation comes from its own derived seed, so results
// are independent of thread count.
ImportanceReport PermutationImportance(const Scorer& scorer, const FeatureMatrix& x,
                                       std::span<const int> labels,
                                       ImportanceMetric metric, int repeats,
                                       std::uint64_t seed, int threads = 1);

}  // namespace snapgap

#endif  // SNAPGAP_METRICS_H_
