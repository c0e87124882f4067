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

#include "snapgap/labeling.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.h"
#include "snapgap/csv.h"
#include "snapgap/error.h"

namespace snapgap {
namespace {

ZipRecord Row(std::string zip, double rate, double pov, double snap) {
  ZipRecord r;
  r.zip = std::move(zip);
  r.year = 2016;
  r.poverty_rate = rate;
  r.pov_fam = pov;
  r.snap_fam = snap;
  r.predictors = {10.0, 20.0, 30.0, 40.0};
  return r;
}

TEST(Uptake, Examples) {
  const auto a = ComputeUptake(40, 100);
  EXPECT_DOUBLE_EQ(a.raw, 0.40);
  EXPECT_DOUBLE_EQ(a.capped, 0.40);
  EXPECT_FALSE(a.anomaly);
  const auto b = ComputeUptake(120, 100);
  EXPECT_DOUBLE_EQ(b.raw, 1.20);
  EXPECT_EQ(b.capped, 1.0);
  EXPECT_TRUE(b.anomaly);
  const auto c = ComputeUptake(0, 100);
  EXPECT_EQ(c.raw, 0.0);
  EXPECT_EQ(c.capped, 0.0);
  EXPECT_FALSE(c.anomaly);
  try {
    ComputeUptake(5, 0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kZeroPoverty);
  }
}

TEST(PovertyRate, SuppliedRateWinsOverCounts) {
  ZipRecord r;
  r.pov_fam = 30;
  r.fam_universe = 100;
  EXPECT_DOUBLE_EQ(*PovertyRate(r), 0.30);
  r.poverty_rate = 0.5;
  EXPECT_EQ(*PovertyRate(r), 0.5);
  r = ZipRecord{};
  r.pov_fam = 30;
  EXPECT_FALSE(PovertyRate(r).has_value());
}

TEST(Eligibility, Examples) {
  const LabelConfig cfg;
  const std::array<std::optional<double>, 4> full = {1.0, 2.0, 3.0, 4.0};
  EXPECT_FALSE(IsEligible(0.10, 0.5, full, cfg));
  EXPECT_TRUE(IsEligible(0.30, 0.5, full, cfg));
  EXPECT_FALSE(IsEligible(0.30, std::nullopt, full, cfg));
  EXPECT_TRUE(IsEligible(0.15, 0.5, full, cfg));
  EXPECT_FALSE(IsEligible(0.30, 0.0, full, cfg));
  EXPECT_FALSE(IsEligible(0.30, std::numeric_limits<double>::infinity(), full, cfg));
  auto partial = full;
  partial[3].reset();
  EXPECT_FALSE(IsEligible(0.30, 0.5, partial, cfg));
  LabelConfig zero_floor;
  zero_floor.poverty_floor = 0.0;
  EXPECT_FALSE(IsEligible(0.0, 0.5, full, zero_floor));
}

TEST(Quantile, Examples) {
  std::vector<double> ten(10);
  std::iota(ten.begin(), ten.end(), 1.0);
  EXPECT_NEAR(Quantile(ten, 0.70), 7.3, 1e-12);
  EXPECT_EQ(Quantile(std::vector<double>{4.5}, 0.3), 4.5);
  EXPECT_EQ(Quantile(std::vector<double>{5, 5, 5}, 0.10), 5.0);
  try {
    Quantile(std::vector<double>{}, 0.5);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyInput);
  }
}

TEST(Quantile, SandwichAndMonotone) {
  testing::Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(testing::UniformInt(rng, 1, 30));
    for (double& x : v) x = testing::Uniform(rng, -5, 5);
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    double prev = -INFINITY;
    for (double q = 0.0; q <= 1.0; q += 0.05) {
      const double x = Quantile(v, q);
      EXPECT_GE(x, lo);
      EXPECT_LE(x, hi);
      EXPECT_GE(x, prev);
      prev = x;
    }
  }
}

TEST(BuildLabels, MatchesSortAndThresholdOracle) {
  testing::Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = testing::RandomPanel(rng, testing::UniformInt(rng, 1, 50));
    LabelConfig cfg;
    cfg.stratify_by_area = trial % 2 == 1;
    cfg.uptake_basis = trial % 5 == 0 ? UptakeBasis::kRaw : UptakeBasis::kCapped;
    const auto expected = testing::OracleLabels(rows, cfg);
    if (std::count(expected.begin(), expected.end(), -1) ==
        static_cast<long>(expected.size())) {
      EXPECT_THROW(BuildLabels(rows, cfg), Error);
      continue;
    }
    const LabeledPanel panel = BuildLabels(rows, cfg);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(static_cast<int>(panel.rows[i].y), expected[i]) << "trial " << trial << " row " << i;
    }
  }
}

TEST(BuildLabels, Invariants) {
  testing::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = testing::RandomPanel(rng, 200);
    LabelConfig cfg;
    cfg.stratify_by_area = trial % 2 == 0;
    const LabeledPanel panel = BuildLabels(rows, cfg);
    std::size_t eligible = 0, positives = 0, covered = 0;
    for (const LabeledRow& row : panel.rows) {
      EXPECT_EQ(row.y == Label::kMissing, !row.eligible);
      if (!row.eligible) continue;
      ++eligible;
      const ThresholdSet* t = panel.ThresholdsFor(row.record.area);
      ASSERT_NE(t, nullptr);
      if (row.y == Label::kPositive) {
        ++positives;
        EXPECT_GE(*row.poverty_rate, t->tau_hi);
        EXPECT_LE(*row.s_capped, t->tau_lo);
      }
    }
    for (const ThresholdSet& t : panel.thresholds) covered += t.eligible;
    EXPECT_EQ(covered, eligible);
    EXPECT_EQ(panel.eligible, eligible);
    EXPECT_EQ(panel.positives, positives);
    EXPECT_DOUBLE_EQ(panel.prevalence, static_cast<double>(positives) / eligible);
  }
}

TEST(BuildLabels, RaisingFloorNeverAddsEligibleRows) {
  testing::Rng rng(8);
  const auto rows = testing::RandomPanel(rng, 300);
  std::size_t prev = rows.size() + 1;
  for (double floor = 0.0; floor < 0.6; floor += 0.05) {
    LabelConfig cfg;
    cfg.poverty_floor = floor;
    std::size_t eligible = 0;
    try {
      eligible = BuildLabels(rows, cfg).eligible;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kNoEligibleRows);
    }
    EXPECT_LE(eligible, prev);
    prev = eligible;
  }
}

TEST(BuildLabels, ConstantPanelAllPositive) {
  std::vector<ZipRecord> rows;
  for (int i = 0; i < 12; ++i) rows.push_back(Row("0000" + std::to_string(i % 10), 0.3, 100, 40));
  const LabeledPanel panel = BuildLabels(rows, LabelConfig{});
  EXPECT_EQ(panel.positives, 12u);
  EXPECT_EQ(panel.prevalence, 1.0);
}

TEST(BuildLabels, AnomaliesRetainedAndCapped) {
  std::vector<ZipRecord> rows = {Row("00001", 0.3, 100, 150), Row("00002", 0.3, 100, 20),
                                 Row("00003", 0.3, 100, 0)};
  const LabeledPanel panel = BuildLabels(rows, LabelConfig{});
  EXPECT_TRUE(panel.rows[0].eligible);
  EXPECT_DOUBLE_EQ(*panel.rows[0].s_raw, 1.5);
  EXPECT_EQ(*panel.rows[0].s_capped, 1.0);
  EXPECT_FALSE(panel.rows[2].eligible);
  EXPECT_EQ(panel.rows[2].y, Label::kMissing);
}

TEST(BuildLabels, StratifiedThresholdsPerArea) {
  std::vector<ZipRecord> rows;
  for (int i = 0; i < 10; ++i) {
    rows.push_back(Row("1000" + std::to_string(i), 0.2 + 0.01 * i, 100, 50 + i));
    rows.back().area = Area::kUrban;
    rows.push_back(Row("2000" + std::to_string(i), 0.4 + 0.02 * i, 100, 10 + i));
    rows.back().area = Area::kRural;
  }
  LabelConfig cfg;
  cfg.stratify_by_area = true;
  const LabeledPanel panel = BuildLabels(rows, cfg);
  ASSERT_EQ(panel.thresholds.size(), 2u);
  const ThresholdSet* urban = panel.ThresholdsFor(Area::kUrban);
  const ThresholdSet* rural = panel.ThresholdsFor(Area::kRural);
  EXPECT_NEAR(urban->tau_hi, 0.2 + 0.01 * 6.3, 1e-12);
  EXPECT_NEAR(rural->tau_lo, 0.109, 1e-12);
  EXPECT_EQ(panel.ThresholdsFor(Area::kMixed), nullptr);
  EXPECT_EQ(urban->eligible + rural->eligible, 20u);
}

TEST(ApplyThresholds, UsesGivenThresholds) {
  std::vector<ZipRecord> rows = {Row("00001", 0.3, 100, 10), Row("00002", 0.2, 100, 10),
                                 Row("00003", 0.3, 100, 60)};
  ThresholdSet t;
  t.tau_hi = 0.25;
  t.tau_lo = 0.5;
  const LabeledPanel panel = ApplyThresholds(rows, LabelConfig{}, std::vector<ThresholdSet>{t});
  EXPECT_EQ(panel.rows[0].y, Label::kPositive);
  EXPECT_EQ(panel.rows[1].y, Label::kNegative);
  EXPECT_EQ(panel.rows[2].y, Label::kNegative);
  EXPECT_EQ(panel.thresholds[0].positives, 1u);
  LabelConfig strat;
  strat.stratify_by_area = true;
  EXPECT_THROW(ApplyThresholds(rows, strat, std::vector<ThresholdSet>{t}), Error);
}

TEST(LabelConfig, Validate) {
  LabelConfig bad;
  bad.lo_q = 0.8;
  EXPECT_THROW(bad.Validate(), Error);
  bad = LabelConfig{};
  bad.poverty_floor = 1.0;
  EXPECT_THROW(bad.Validate(), Error);
  EXPECT_NO_THROW(LabelConfig{}.Validate());
}

TEST(Ols, Examples) {
  const auto a = FitOls(std::vector<double>{1, 2}, std::vector<double>{2, 4});
  EXPECT_NEAR(a.alpha, 0.0, 1e-12);
  EXPECT_NEAR(a.beta, 2.0, 1e-12);
  EXPECT_NEAR(a.Residual(1, 2), 0.0, 1e-12);
  const auto b = FitOls(std::vector<double>{0, 1, 2}, std::vector<double>{1, 1, 1});
  EXPECT_EQ(b.alpha, 1.0);
  EXPECT_EQ(b.beta, 0.0);
  try {
    FitOls(std::vector<double>{3, 3, 3}, std::vector<double>{1, 2, 3});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateDesign);
  }
}

TEST(Ols, MatchesNormalEquationsOracle) {
  testing::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(testing::UniformInt(rng, 3, 12)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::round(testing::Uniform(rng, 10, 2000));
      y[i] = std::round(0.6 * x[i] + testing::Uniform(rng, -80, 80));
    }
    const OlsFit fit = FitOls(x, y);
    const testing::LineFit oracle = testing::OracleOls(x, y);
    EXPECT_NEAR(fit.alpha, oracle.alpha, 1e-10 * std::max(1.0, std::abs(oracle.alpha)));
    EXPECT_NEAR(fit.beta, oracle.beta, 1e-10 * std::max(1.0, std::abs(oracle.beta)));
    double sum = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum += fit.Residual(x[i], y[i]);
      scale += std::abs(y[i]);
    }
    EXPECT_LT(std::abs(sum), 1e-9 * scale);
    EXPECT_GE(fit.r2, 0.0);
    EXPECT_LE(fit.r2, 1.0);
  }
}

TEST(HiddenFragility, PlantedUnderEnrollmentBelowPovertyCut) {
  std::vector<ZipRecord> rows;
  for (int i = 0; i < 40; ++i) {
    const double pov = 100 + 10 * i;
    rows.push_back(Row("1" + std::to_string(1000 + i), 0.2 + 0.005 * i, pov, 0.6 * pov));
  }
  // Mid poverty rate, far below the fitted line.
  rows[10].snap_fam = 5.0;
  LabeledPanel panel = BuildLabels(rows, LabelConfig{});
  ASSERT_LT(*panel.rows[10].poverty_rate, panel.thresholds[0].tau_hi);
  AttachResiduals(panel);
  const auto hidden = FlagHiddenFragility(panel, 0.05);
  ASSERT_FALSE(hidden.empty());
  EXPECT_EQ(hidden[0].zip, rows[10].zip);
  EXPECT_LT(hidden[0].residual, 0.0);
  EXPECT_TRUE(FlagHiddenFragility(panel, 0.0).empty());
}

TEST(HiddenFragility, EmptyWhenQuantileRuleCatchesAll) {
  std::vector<ZipRecord> rows;
  for (int i = 0; i < 10; ++i) {
    const double pov = 100 + 10 * i;
    rows.push_back(Row("2" + std::to_string(1000 + i), 0.3, pov, 0.5 * pov));
  }
  rows[9].snap_fam = 10;
  rows[9].poverty_rate = 0.5;
  LabeledPanel panel = BuildLabels(rows, LabelConfig{});
  ASSERT_EQ(panel.rows[9].y, Label::kPositive);
  AttachResiduals(panel);
  ASSERT_LT(*panel.rows[9].residual, 0.0);
  EXPECT_TRUE(FlagHiddenFragility(panel, 0.1).empty());
}

TEST(WriteLabeledPanel, AppendsDerivedColumns) {
  std::vector<ZipRecord> rows = {Row("00001", 0.3, 100, 40), Row("00002", 0.1, 100, 40)};
  LabeledPanel panel = BuildLabels(rows, LabelConfig{});
  std::ostringstream out;
  WriteLabeledPanel(out, panel);
  std::istringstream in(out.str());
  const csv::Table table = csv::Read(in);
  const auto col = [&](const std::string& name) {
    return std::find(table.header.begin(), table.header.end(), name) - table.header.begin();
  };
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0][col("s_capped")], "0.4");
  EXPECT_EQ(table.rows[0][col("y")], "1");
  EXPECT_EQ(table.rows[1][col("eligible")], "0");
  EXPECT_EQ(table.rows[1][col("y")], "NA");
}

}  // namespace
}  // namespace snapgap
