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

#include "snapgap/logistic.h"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"
#include "snapgap/error.h"
#include "snapgap/feature_matrix.h"

namespace snapgap {
namespace {

struct Dataset {
  FeatureMatrix x;
  std::vector<int> y;
};

Dataset RandomDataset(testing::Rng& rng, std::size_t n, std::size_t d) {
  Dataset data{FeatureMatrix(n, d), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double z = -0.5;
    for (std::size_t j = 0; j < d; ++j) {
      data.x(i, j) = testing::Uniform(rng, -2, 2);
      z += (j % 2 ? -0.8 : 0.6) * data.x(i, j);
    }
    data.y[i] = testing::Uniform(rng, 0, 1) < Sigmoid(z) ? 1 : 0;
  }
  data.y[0] = 1;
  data.y[1] = 0;
  return data;
}

TEST(Standardize, Examples) {
  const auto two = Standardize(FeatureMatrix::FromRows({{0.0}, {10.0}}));
  EXPECT_EQ(two.matrix(0, 0), -1.0);
  EXPECT_EQ(two.matrix(1, 0), 1.0);

  const auto again = Standardize(two.matrix);
  EXPECT_NEAR(again.matrix(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(again.matrix(1, 0), 1.0, 1e-12);

  const auto constant = Standardize(FeatureMatrix::FromRows({{5.0}, {5.0}, {5.0}}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(constant.matrix(i, 0), 0.0);
  EXPECT_EQ(constant.standardization.constant_features, std::vector<std::size_t>{0});
}

TEST(Standardize, TestShiftMovesByShiftOverSd) {
  testing::Rng rng(4);
  const Dataset train = RandomDataset(rng, 30, 3);
  const Standardization s = FitStandardization(train.x);
  FeatureMatrix test = RandomDataset(rng, 10, 3).x;
  FeatureMatrix shifted = test;
  for (std::size_t i = 0; i < test.rows(); ++i) shifted(i, 1) += 7.0;
  const FeatureMatrix a = s.Apply(test), b = s.Apply(shifted);
  for (std::size_t i = 0; i < test.rows(); ++i) {
    EXPECT_NEAR(b(i, 1) - a(i, 1), 7.0 / s.sds[1], 1e-12);
    EXPECT_EQ(b(i, 0), a(i, 0));
  }
  EXPECT_THROW(s.Apply(FeatureMatrix(2, 2)), Error);
}

TEST(LogisticObjective, GradientMatchesCentralDifferences) {
  testing::Rng rng(31);
  for (int dataset = 0; dataset < 5; ++dataset) {
    const Dataset data = RandomDataset(rng, 40, 1 + dataset % 4);
    const auto w = ClassWeights(data.y, ClassWeighting::kBalanced);
    const LogisticObjective f(data.x, data.y, w, 0.7);
    for (int point = 0; point < 10; ++point) {
      std::vector<double> theta(f.dimension());
      for (double& t : theta) t = testing::Uniform(rng, -2, 2);
      const auto g = f.Gradient(theta);
      double max_diff = 0.0, max_g = 0.0;
      for (std::size_t k = 0; k < theta.size(); ++k) {
        const double h = 1e-5;
        auto up = theta, down = theta;
        up[k] += h;
        down[k] -= h;
        const double fd = (f.Value(up) - f.Value(down)) / (2 * h);
        max_diff = std::max(max_diff, std::abs(fd - g[k]));
        max_g = std::max(max_g, std::abs(g[k]));
      }
      EXPECT_LT(max_diff / std::max(1.0, max_g), 1e-6);
    }
  }
}

TEST(LogisticObjective, MidpointConvexAlongSegments) {
  testing::Rng rng(12);
  const Dataset data = RandomDataset(rng, 50, 3);
  const auto w = ClassWeights(data.y, ClassWeighting::kNone);
  const LogisticObjective f(data.x, data.y, w, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(4), b(4), mid(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = testing::Uniform(rng, -3, 3);
      b[k] = testing::Uniform(rng, -3, 3);
      mid[k] = 0.5 * (a[k] + b[k]);
    }
    EXPECT_LE(f.Value(mid), 0.5 * (f.Value(a) + f.Value(b)) + 1e-9);
  }
}

TEST(ClassWeights, Balanced) {
  const std::vector<int> y = {1, 0, 0, 0};
  const auto w = ClassWeights(y, ClassWeighting::kBalanced);
  EXPECT_DOUBLE_EQ(w[0], 2.0);
  EXPECT_DOUBLE_EQ(w[1], 4.0 / 6.0);
  for (double v : ClassWeights(y, ClassWeighting::kNone)) EXPECT_EQ(v, 1.0);
}

TEST(FitLogistic, InfiniteRegularizationLimit) {
  testing::Rng rng(6);
  const Dataset data = RandomDataset(rng, 80, 2);
  LogisticParams p;
  p.c = 1e-12;
  const LogisticModel m = FitLogistic(data.x, data.y, p);
  for (double b : m.coefficients) EXPECT_NEAR(b, 0.0, 1e-9);
  EXPECT_NEAR(m.intercept, 0.0, 1e-9);
  for (double prob : m.PredictProba(data.x)) EXPECT_NEAR(prob, 0.5, 1e-9);
}

// Nested grid search: each pass zooms a 41 x 41 grid onto the best cell.
std::pair<double, double> GridMinimize(const std::function<double(double, double)>& f) {
  double cb = 0.0, ci = 0.0, span = 4.0;
  for (int pass = 0; pass < 12; ++pass) {
    double best = INFINITY, bb = cb, bi = ci;
    for (int i = -20; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const double beta = cb + span * i / 20.0, icpt = ci + span * j / 20.0;
        const double v = f(beta, icpt);
        if (v < best) {
          best = v;
          bb = beta;
          bi = icpt;
        }
      }
    }
    cb = bb;
    ci = bi;
    span /= 8.0;
  }
  return {cb, ci};
}

TEST(FitLogistic, SeparableToyMatchesGridMinimizer) {
  const FeatureMatrix x = FeatureMatrix::FromRows({{-1.0}, {1.0}});
  const std::vector<int> y = {0, 1};
  LogisticParams p;
  p.c = 1.0;
  const LogisticModel m = FitLogistic(x, y, p);
  const auto [beta, icpt] = GridMinimize([](double b, double c) {
    return std::log1p(std::exp(c - b)) + std::log1p(std::exp(-(c + b))) + 0.5 * b * b;
  });
  EXPECT_GT(m.coefficients[0], 0.0);
  EXPECT_NEAR(m.coefficients[0], beta, 1e-6);
  EXPECT_NEAR(m.intercept, icpt, 1e-6);
}

TEST(FitLogistic, ConvergesToStationaryPoint) {
  testing::Rng rng(8);
  const Dataset data = RandomDataset(rng, 300, 4);
  const LogisticModel m = FitLogistic(data.x, data.y, LogisticParams{});
  EXPECT_LE(m.gradient_norm, 1e-8);
  EXPECT_GT(m.iterations, 0);
  for (double prob : m.PredictProba(data.x)) {
    EXPECT_GT(prob, 0.0);
    EXPECT_LT(prob, 1.0);
  }
}

TEST(FitLogistic, PositiveRescalingLeavesProbabilitiesUnchanged) {
  testing::Rng rng(10);
  const Dataset data = RandomDataset(rng, 120, 3);
  FeatureMatrix scaled = data.x;
  for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, 2) *= 37.5;
  const auto a = FitLogistic(data.x, data.y, LogisticParams{}).PredictProba(data.x);
  const auto b = FitLogistic(scaled, data.y, LogisticParams{}).PredictProba(scaled);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(FitLogistic, BalancedEqualsDuplicatedPositives) {
  testing::Rng rng(14);
  Dataset data = RandomDataset(rng, 60, 2);
  std::size_t n_pos = 0;
  for (int& v : data.y) v = 0;
  for (std::size_t i = 0; i < 60; i += 4) {
    data.y[i] = 1;
    ++n_pos;
  }
  const std::size_t n_neg = 60 - n_pos;
  const std::size_t k = n_neg / n_pos;
  ASSERT_EQ(k * n_pos, n_neg);

  std::vector<std::vector<double>> rows;
  std::vector<int> dup_y;
  for (std::size_t i = 0; i < 60; ++i) {
    const int copies = data.y[i] == 1 ? static_cast<int>(k) : 1;
    for (int c = 0; c < copies; ++c) {
      rows.push_back({data.x(i, 0), data.x(i, 1)});
      dup_y.push_back(data.y[i]);
    }
  }
  LogisticParams balanced;
  balanced.standardize = false;
  balanced.c = 0.5;
  LogisticParams plain = balanced;
  plain.weighting = ClassWeighting::kNone;
  // Balanced weights sum to n; the duplicated sample weighs 2 n_neg, so the
  // penalty has to grow by the same ratio.
  plain.c = balanced.c * 60.0 / (2.0 * n_neg);
  const LogisticModel a = FitLogistic(data.x, data.y, balanced);
  const LogisticModel b = FitLogistic(FeatureMatrix::FromRows(rows), dup_y, plain);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-7);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(a.coefficients[j], b.coefficients[j], 1e-7);
}

TEST(FitLogistic, Errors) {
  const FeatureMatrix x = FeatureMatrix::FromRows({{1.0}, {2.0}, {3.0}});
  try {
    FitLogistic(x, std::vector<int>{1, 1, 1}, LogisticParams{});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingleClass);
  }
  LogisticParams bad;
  bad.c = -1;
  EXPECT_THROW(FitLogistic(x, std::vector<int>{1, 0, 1}, bad), Error);
  const LogisticModel m = FitLogistic(x, std::vector<int>{0, 1, 1}, LogisticParams{});
  try {
    m.PredictProba(FeatureMatrix(2, 3));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFeatureMismatch);
  }
}

TEST(FitLogistic, NonConvergenceReportsGradient) {
  testing::Rng rng(2);
  const Dataset data = RandomDataset(rng, 100, 3);
  LogisticParams p;
  p.max_iterations = 1;
  p.gradient_tolerance = 1e-30;
  try {
    FitLogistic(data.x, data.y, p);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonConvergence);
    EXPECT_NE(std::string(e.what()).find("gradient"), std::string::npos);
  }
}

TEST(PredictProba, ZeroModelIsHalf) {
  LogisticModel m;
  m.coefficients = {0.0, 0.0};
  m.intercept = 0.0;
  for (double p : m.PredictProba(FeatureMatrix::FromRows({{1, 2}, {-5, 9}}))) EXPECT_EQ(p, 0.5);
}

}  // namespace
}  // namespace snapgap
