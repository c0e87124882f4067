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

#ifndef SNAPGAP_CALIBRATION_H_
#define SNAPGAP_CALIBRATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace snapgap {

// Monotone piecewise-linear map from raw scores to probabilities.
struct IsotonicMap {
  std::vector<double> scores;  // strictly increasing
  std::vector<double> values;  // non-decreasing, in [0, 1]
  std::size_t fitted_on = 0;

  // Clamped outside the fitted range, linear between breakpoints.
  double Apply(double score) const;
  std::vector<double> Apply(std::span<const double> scores) const;

  bool operator==(const IsotonicMap&) const = default;
};

// Pool-adjacent-violators least-squares fit under a non-decreasing
// constraint. Equal scores are pooled first. Only the two ends of each
// constant block are kept as breakpoints. Throws kInsufficientData for fewer
// than two pairs.
IsotonicMap FitIsotonic(std::span<const double> scores, std::span<const double> targets);
IsotonicMap FitIsotonic(std::span<const double> scores, std::span<const int> labels);

// The PAV fitted value for every input pair, in input order.
std::vector<double> IsotonicFittedValues(std::span<const double> scores,
                                         std::span<const double> targets);

enum class ThresholdPolicy { kPrevalenceAnchored, kYouden, kFixed };

std::string_view PolicyName(ThresholdPolicy policy);

struct DecisionRule {
  ThresholdPolicy policy = ThresholdPolicy::kFixed;
  double threshold = 0.5;
  std::optional<double> source_prevalence;

  bool operator==(const DecisionRule&) const = default;
};

// Flags when the calibrated probability is at least the training prevalence.
// Throws kDegeneratePrevalence unless 0 < prevalence < 1.
DecisionRule PrevalenceThreshold(double train_prevalence);

// Cutpoint maximizing TPR - FPR over: the lowest score (flag all), midpoints
// between adjacent distinct scores, and just above the highest score (flag
// none). Ties go to the higher cutpoint. Throws kSingleClass.
DecisionRule YoudenThreshold(std::span<const double> scores, std::span<const int> labels);

// TPR - FPR when flagging scores >= threshold.
double YoudenJ(std::span<const double> scores, std::span<const int> labels,
               double threshold);

// 1 iff p >= rule.threshold.
std::vector<int> Classify(std::span<const double> probabilities, const DecisionRule& rule);

struct ReliabilityBin {
  double bin_center = 0.0;
  double mean_predicted = 0.0;
  double observed_rate = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [0, 1]; only occupied bins are returned. A
// probability of exactly 1 falls in the last bin.
std::vector<ReliabilityBin> ReliabilityCurve(std::span<const double> probabilities,
                                             std::span<const int> labels, int bins = 10);

// Unweighted mean of |observed - predicted| over occupied bins.
double MeanCalibrationGap(std::span<const ReliabilityBin> bins);

}  // namespace snapgap

#endif  // SNAPGAP_CALIBRATION_H_
