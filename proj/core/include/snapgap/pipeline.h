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

#ifndef SNAPGAP_PIPELINE_H_
#define SNAPGAP_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snapgap/calibration.h"
#include "snapgap/cv.h"
#include "snapgap/ingest.h"
#include "snapgap/labeling.h"
#include "snapgap/metrics.h"
#include "snapgap/model.h"
#include "snapgap/scorer.h"

namespace snapgap {

struct YearRange {
  int first = 0;
  int last = 0;
  bool Contains(int year) const { return year >= first && year <= last; }
  bool operator==(const YearRange&) const = default;
};

enum class AreaMode { kPooled, kStratified };
enum class ThresholdMode { kRefit, kFrozen };
// Multivariate: stratified CV grid search, isotonic calibration on
// out-of-fold scores, prevalence-anchored rule. Univariate: stratified
// holdout split, CV on the fitting part, Youden cutpoint on the holdout,
// no calibration.
enum class EvalPath { kMultivariate, kUnivariate };

std::string_view AreaModeName(AreaMode mode);
std::string_view ThresholdModeName(ThresholdMode mode);
std::string_view EvalPathName(EvalPath path);

// Predictor indices into kPredictorNames, ascending.
using FeatureSubset = std::vector<std::size_t>;

// All 15 nonempty subsets of the four predictors, smallest first.
std::vector<FeatureSubset> AllFeatureSubsets();
std::vector<FeatureSubset> SingletonSubsets();
std::string SubsetTag(const FeatureSubset& subset);

struct BacktestConfig {
  YearRange p1{2014, 2018};
  YearRange p2{2019, 2023};
  LabelConfig label;
  // Subsets for the logistic family; empty means AllFeatureSubsets().
  std::vector<FeatureSubset> feature_subsets;
  // Subsets for the tree families; empty means all four predictors only.
  std::vector<FeatureSubset> tree_feature_subsets;
  std::vector<ModelFamily> families = {ModelFamily::kLogistic, ModelFamily::kRandomForest,
                                       ModelFamily::kGradientBoosting};
  // Families absent from the map use DefaultGrid().
  std::map<ModelFamily, std::vector<Hyperparameters>> grids;
  int folds = 5;
  std::uint64_t seed = 0;
  AreaMode area_mode = AreaMode::kPooled;
  ThresholdMode threshold_mode = ThresholdMode::kRefit;
  EvalPath eval_path = EvalPath::kMultivariate;
  ClassWeighting weighting = ClassWeighting::kBalanced;
  int importance_repeats = 10;
  int reliability_bins = 10;
  double hidden_tail = 0.05;
  double holdout_fraction = 0.30;
  // Worker threads; never affects results.
  int threads = 1;

  // Throws kPeriodsOverlap or kInvalidConfig.
  void Validate() const;
  std::vector<FeatureSubset> SubsetsFor(ModelFamily family) const;
  std::vector<Hyperparameters> GridFor(ModelFamily family) const;
};

// Canonical JSON echo of a config. Thread count is left out so it cannot
// influence hashes.
nlohmann::json ConfigToJson(const BacktestConfig& config);

struct PeriodSummary {
  std::string name;  // "P1" or "P2"
  YearRange years;
  std::vector<ThresholdSet> thresholds;
  std::size_t rows = 0;
  std::size_t eligible = 0;
  std::size_t positives = 0;
  double prevalence = 0.0;
  std::size_t anomalies = 0;  // rows with SNAP above poverty
  std::optional<OlsFit> ols;
  std::vector<HiddenFragility> hidden_fragility;
};

struct FlaggedZip {
  std::string zip;
  int year = 0;
  double probability = 0.0;
  int label = 0;
  bool operator==(const FlaggedZip&) const = default;
};

// A model fitted on one training cohort.
struct TrainedModel {
  std::string cohort;         // "All" or an area name
  std::optional<Area> area;   // unset when pooled
  ModelFamily family = ModelFamily::kLogistic;
  FeatureSubset features;
  std::string name;           // family[feature+feature]
  std::vector<GridEntry> grid;
  Hyperparameters winner;
  CalibratedScorer scorer;
  std::size_t train_rows = 0;
  std::size_t train_positives = 0;
  double train_prevalence = 0.0;
};

struct CohortResult {
  TrainedModel model;
  EvalReport report;
  ImportanceReport importance;
  std::vector<ReliabilityBin> reliability;
  double calibration_gap = 0.0;
  // Flagged test rows, probability descending then zip and year ascending.
  std::vector<FlaggedZip> flagged;
};

struct CohortFailure {
  std::string cohort;
  std::string model;
  std::string kind;
  std::string message;
};

// Share of each area among the fragile rows of the test period when the
// uptake cut is the 10% or 30% quantile.
struct AreaDistributionRow {
  Area area = Area::kUnknown;
  std::size_t eligible = 0;
  double eligible_share = 0.0;
  std::size_t bottom10 = 0;
  double bottom10_share = 0.0;
  std::size_t bottom30 = 0;
  double bottom30_share = 0.0;
};

struct YearDiagnostics {
  int year = 0;
  std::size_t rows = 0;
  std::size_t eligible = 0;
  std::optional<double> tau_hi;
  std::optional<double> tau_lo;
  double prevalence = 0.0;
  std::size_t anomalies = 0;
};

struct TrainingResult {
  PeriodSummary p1;
  std::vector<TrainedModel> models;
  std::vector<CohortFailure> failures;
};

struct RunManifest {
  std::string version;
  std::string config_hash;
  nlohmann::json config;
  std::map<std::string, std::string> input_digests;
  std::vector<PeriodSummary> periods;
  std::vector<CohortResult> results;
  std::vector<CohortFailure> failures;
  std::vector<AreaDistributionRow> area_distribution;
  std::vector<YearDiagnostics> yearly;
};

inline constexpr std::string_view kManifestFormat = "snapgap.manifest/1";

// Canonical manifest document with a trailing "digest" member: the SHA-256
// of the document serialized without it.
nlohmann::json ManifestToJson(const RunManifest& manifest);
std::string ManifestDigest(const RunManifest& manifest);

// Fits every (cohort, family, subset) task on training-period rows only.
// Cohort-level failures are collected rather than thrown.
TrainingResult TrainModels(const BacktestConfig& config, std::span<const ZipRecord> panel);

// Full out-of-time run. Rows outside both periods are ignored. Throws
// kPeriodsOverlap, kInvalidConfig, or kNoEligibleRows when a period has no
// eligible row at all.
RunManifest RunBacktest(const BacktestConfig& config, std::span<const ZipRecord> panel);
// RunBacktest with per-area labeling and models.
RunManifest RunAreaStratified(BacktestConfig config, std::span<const ZipRecord> panel);
// One row per year from p1.first to p2.last plus any other year present.
std::vector<YearDiagnostics> RunYearlyDiagnostics(const BacktestConfig& config,
                                                  std::span<const ZipRecord> panel);
// Fragile-row distribution by area in a labeled test period, using pooled
// poverty thresholds.
std::vector<AreaDistributionRow> FragileDistribution(const LabeledPanel& pooled);

}  // namespace snapgap

#endif  // SNAPGAP_PIPELINE_H_
