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

#ifndef SNAPGAP_LABELING_H_
#define SNAPGAP_LABELING_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snapgap/ingest.h"

namespace snapgap {

// Which uptake ratio enters the low-uptake quantile and the label test.
enum class UptakeBasis { kCapped, kRaw };

struct LabelConfig {
  double poverty_floor = 0.15;
  double hi_q = 0.70;
  double lo_q = 0.10;
  bool stratify_by_area = false;
  UptakeBasis uptake_basis = UptakeBasis::kCapped;

  // Throws kInvalidConfig unless 0 < lo_q < hi_q < 1 and 0 <= floor < 1.
  void Validate() const;
};

struct UptakeRatio {
  double raw = 0.0;
  double capped = 0.0;  // min(raw, 1)
  bool anomaly = false;  // raw > 1; retained and flagged, never dropped
};

// Throws kZeroPoverty when pov_fam <= 0.
UptakeRatio ComputeUptake(double snap_fam, double pov_fam);

// Supplied rate if present, else pov_fam / fam_universe.
std::optional<double> PovertyRate(const ZipRecord& record);

// True iff p >= floor, p > 0, s finite and nonzero, and every predictor is
// present. Zero uptake is treated as missing.
bool IsEligible(std::optional<double> poverty_rate, std::optional<double> uptake,
                std::span<const std::optional<double>> predictors,
                const LabelConfig& config);

// Linear-interpolation sample quantile: h = (n - 1) q on the sorted values.
// Throws kEmptyInput for no values.
double Quantile(std::span<const double> values, double q);

enum class Label : std::int8_t { kMissing = -1, kNegative = 0, kPositive = 1 };

struct LabeledRow {
  ZipRecord record;
  std::optional<double> poverty_rate;
  std::optional<double> s_raw;
  std::optional<double> s_capped;
  bool eligible = false;
  Label y = Label::kMissing;
  std::optional<double> residual;

  // The uptake value used for thresholds under `basis`.
  std::optional<double> Uptake(UptakeBasis basis) const {
    return basis == UptakeBasis::kCapped ? s_capped : s_raw;
  }
};

// Thresholds for one labeling group: the whole panel (area unset) or one
// area when labeling is stratified.
struct ThresholdSet {
  std::optional<Area> area;
  double tau_hi = 0.0;
  double tau_lo = 0.0;
  std::size_t eligible = 0;
  std::size_t positives = 0;
  double prevalence = 0.0;

  bool operator==(const ThresholdSet&) const = default;
};

struct LabeledPanel {
  std::vector<LabeledRow> rows;
  std::vector<ThresholdSet> thresholds;
  LabelConfig config;
  std::size_t eligible = 0;
  std::size_t positives = 0;
  double prevalence = 0.0;

  // Thresholds governing rows of `area`; nullptr if that group had no
  // eligible rows.
  const ThresholdSet* ThresholdsFor(Area area) const;
};

// Computes rates, uptake, eligibility, quantile thresholds (per area when
// config.stratify_by_area) and y. Throws kNoEligibleRows.
LabeledPanel BuildLabels(std::span<const ZipRecord> records,
                         const LabelConfig& config);

// Labels with thresholds fixed elsewhere (e.g. frozen from the training
// period). Threshold sets are matched on their area field.
LabeledPanel ApplyThresholds(std::span<const ZipRecord> records,
                             const LabelConfig& config,
                             std::span<const ThresholdSet> thresholds);

struct OlsFit {
  double alpha = 0.0;
  double beta = 0.0;
  double r2 = 0.0;

  double Residual(double x, double y) const { return y - alpha - beta * x; }
};

// Closed-form simple regression of y on x with intercept. Throws
// kDegenerateDesign when fewer than two distinct x values exist.
OlsFit FitOls(std::span<const double> x, std::span<const double> y);

// Regresses SNAP counts on poverty counts over eligible rows and stores each
// eligible row's residual.
OlsFit AttachResiduals(LabeledPanel& panel);

struct HiddenFragility {
  std::string zip;
  int year = 0;
  double residual = 0.0;

  bool operator==(const HiddenFragility&) const = default;
};

// Rows in the most negative ceil(k * n) residuals (n = rows with a residual)
// whose residual is negative and that the quantile rule did not flag.
std::vector<HiddenFragility> FlagHiddenFragility(const LabeledPanel& panel,
                                                 double tail_fraction);

// Input columns plus p, s_raw, s_capped, eligible, y, residual.
void WriteLabeledPanel(std::ostream& out, const LabeledPanel& panel);

}  // namespace snapgap

#endif  // SNAPGAP_LABELING_H_
