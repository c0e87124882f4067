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

#ifndef SNAPGAP_SYNTHETIC_H_
#define SNAPGAP_SYNTHETIC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "snapgap/ingest.h"
#include "snapgap/labeling.h"

namespace snapgap {

// Parameters of the synthetic panel generator. Uptake follows a logistic
// link:
//   logit(s) = logit(base_uptake) - sum_j coef_j z_j - kappa z_p + shift_area + e,
// where z_j are standardized predictors, z_p is standardized poverty and
// e ~ N(0, uptake_noise^2). A coefficient is therefore an effect on the log
// odds of *low* uptake: negative values mean the predictor protects against
// fragility. kappa is solved per year so the labeled prevalence matches the
// year's target.
struct SyntheticSpec {
  std::size_t n_zips = 2000;
  int first_year = 2014;
  int last_year = 2023;
  // Urban, Rural, Mixed, Unknown. Must sum to 1.
  std::array<double, 4> area_mix = {0.6, 0.3, 0.1, 0.0};
  std::array<double, kNumPredictors> true_coefficients = {-0.5, 0.0, 0.0, 0.0};
  double target_prevalence = 0.031;
  // Prevalence in the last year; the target moves linearly between the two.
  std::optional<double> target_prevalence_end;
  double anomaly_rate = 0.0;
  // Additive uptake log-odds shift for Urban, Rural, Mixed, Unknown.
  std::array<double, 4> area_uptake_shift = {0.0, 0.0, 0.0, 0.0};
  double base_uptake = 0.6;
  double uptake_noise = 1.0;
  // Share of predictor variance that is persistent per zip across years.
  double persistence = 0.8;
  // Probability that any single predictor cell is blank.
  double missing_rate = 0.0;
  std::uint64_t seed = 0;

  // Throws kInvalidSpec.
  void Validate() const;
  double TargetFor(int year) const;
};

struct SyntheticYear {
  int year = 0;
  double target_prevalence = 0.0;
  double kappa = 0.0;
  double realized_prevalence = 0.0;
  std::size_t eligible = 0;
  std::size_t anomalies = 0;
};

// What the generator knows and a model can only estimate.
struct SyntheticTruth {
  std::array<double, kNumPredictors> coefficients{};
  std::vector<SyntheticYear> years;
  std::size_t planted_anomalies = 0;
  // Per record: 1, 0 or -1 (ineligible), labeled within its own year.
  std::vector<int> labels;
  // Per record: the latent standardized predictor draws.
  std::vector<std::array<double, kNumPredictors>> latent;
};

struct SyntheticPanel {
  std::vector<ZipRecord> records;  // year-major, zips ascending
  SyntheticTruth truth;
};

SyntheticPanel GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace snapgap

#endif  // SNAPGAP_SYNTHETIC_H_
