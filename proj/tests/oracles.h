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

// Independent reference implementations used by the unit and acceptance
// tests. Each one is written from the definition, favoring clarity over
// speed.
#ifndef SNAPGAP_TESTS_ORACLES_H_
#define SNAPGAP_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "snapgap/ingest.h"
#include "snapgap/labeling.h"

namespace snapgap::testing {

using Rng = std::mt19937_64;

inline double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Sorted-rank interpolation at h = (n - 1) q.
inline double OracleQuantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - lo;
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// Small panel with the kinds of rows the eligibility rule has to sort out:
// low poverty, missing predictors, zero uptake, anomalies, repeated values.
inline std::vector<ZipRecord> RandomPanel(Rng& rng, std::size_t n) {
  std::vector<ZipRecord> rows;
  // Drawing some values from a short list produces ties at the thresholds.
  const std::vector<double> rate_pool = {0.12, 0.15, 0.2, 0.25, 0.3, 0.4};
  const std::vector<double> snap_pool = {0, 10, 20, 35, 50, 80, 120};
  for (std::size_t i = 0; i < n; ++i) {
    ZipRecord r;
    char zip[8];
    std::snprintf(zip, sizeof zip, "%05zu", i + 10);
    r.zip = zip;
    r.year = 2014 + UniformInt(rng, 0, 4);
    r.pov_fam = 100.0;
    r.snap_fam = UniformInt(rng, 0, 2) == 0 ? snap_pool[UniformInt(rng, 0, 6)]
                                            : std::round(Uniform(rng, 0, 130));
    if (UniformInt(rng, 0, 19) == 0) r.snap_fam.reset();
    r.poverty_rate = UniformInt(rng, 0, 2) == 0 ? rate_pool[UniformInt(rng, 0, 5)]
                                                : Uniform(rng, 0.0, 0.6);
    for (auto& p : r.predictors) p = Uniform(rng, 0, 100);
    if (UniformInt(rng, 0, 9) == 0) r.predictors[UniformInt(rng, 0, 3)].reset();
    r.area = static_cast<Area>(UniformInt(rng, 0, 3));
    rows.push_back(r);
  }
  return rows;
}

// y per row: 1, 0, or -1 when not eligible.
inline std::vector<int> OracleLabels(std::span<const ZipRecord> rows,
                                     const LabelConfig& config) {
  const std::size_t n = rows.size();
  std::vector<std::optional<double>> p(n), s(n);
  std::vector<bool> eligible(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const ZipRecord& r = rows[i];
    if (r.poverty_rate) {
      p[i] = r.poverty_rate;
    } else if (r.pov_fam && r.fam_universe && *r.fam_universe > 0) {
      p[i] = *r.pov_fam / *r.fam_universe;
    }
    if (r.pov_fam && r.snap_fam && *r.pov_fam > 0) {
      const double raw = *r.snap_fam / *r.pov_fam;
      s[i] = config.uptake_basis == UptakeBasis::kCapped ? std::min(raw, 1.0) : raw;
    }
    bool ok = p[i] && *p[i] > 0 && *p[i] >= config.poverty_floor && s[i] &&
              std::isfinite(*s[i]) && *s[i] != 0.0;
    for (const auto& x : r.predictors) ok = ok && x.has_value();
    eligible[i] = ok;
  }
  std::vector<int> y(n, -1);
  std::vector<int> groups = {-1};
  if (config.stratify_by_area) groups = {0, 1, 2, 3};
  for (int g : groups) {
    std::vector<double> ps, ss;
    for (std::size_t i = 0; i < n; ++i) {
      if (!eligible[i] || (g >= 0 && static_cast<int>(rows[i].area) != g)) continue;
      ps.push_back(*p[i]);
      ss.push_back(*s[i]);
    }
    if (ps.empty()) continue;
    const double tau_hi = OracleQuantile(ps, config.hi_q);
    const double tau_lo = OracleQuantile(ss, config.lo_q);
    for (std::size_t i = 0; i < n; ++i) {
      if (!eligible[i] || (g >= 0 && static_cast<int>(rows[i].area) != g)) continue;
      y[i] = (*p[i] >= tau_hi && *s[i] <= tau_lo) ? 1 : 0;
    }
  }
  return y;
}

struct LineFit {
  double alpha = 0.0;
  double beta = 0.0;
};

// Normal equations [n sx; sx sxx] [a; b] = [sy; sxy] by Cramer's rule in
// extended precision.
inline LineFit OracleOls(std::span<const double> x, std::span<const double> y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double det = n * sxx - sx * sx;
  return {static_cast<double>((sy * sxx - sx * sxy) / det),
          static_cast<double>((n * sxy - sx * sy) / det)};
}

// Mann-Whitney by enumerating every positive/negative pair.
inline double OracleAuc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Walks the distinct score levels from the top. At each level the whole tie
// group is flagged at once; the recall gained there is weighted by the
// precision of everything flagged so far.
inline double OracleAp(std::span<const double> scores, std::span<const int> labels) {
  std::vector<double> levels(scores.begin(), scores.end());
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const double total_pos = std::count(labels.begin(), labels.end(), 1);
  double ap = 0.0, prev_recall = 0.0;
  for (double t : levels) {
    double flagged = 0, tp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) {
        ++flagged;
        tp += labels[i] == 1;
      }
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / flagged);
    prev_recall = recall;
  }
  return ap;
}

// Full stable sort by descending score, then count positives in the head.
inline double OraclePrecisionAtK(std::span<const double> scores, std::span<const int> labels,
                                 double fraction) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const auto k = static_cast<std::size_t>(std::ceil(fraction * scores.size() - 1e-9));
  double hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += labels[order[i]] == 1;
  return hits / k;
}

inline double SquaredError(std::span<const double> fitted, std::span<const double> targets) {
  double sse = 0.0;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    sse += (fitted[i] - targets[i]) * (fitted[i] - targets[i]);
  }
  return sse;
}

// True when values are non-decreasing along ascending score, with equal
// scores sharing a value.
inline bool MonotoneInScore(std::span<const double> scores, std::span<const double> values) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[i] < scores[j] && values[i] > values[j]) return false;
      if (scores[i] == scores[j] && values[i] != values[j]) return false;
    }
  }
  return true;
}

// Largest TPR - FPR over every cutpoint that changes the flagged set.
inline double OracleBestYouden(std::span<const double> scores, std::span<const int> labels) {
  std::vector<double> cuts(scores.begin(), scores.end());
  cuts.push_back(std::numeric_limits<double>::infinity());
  const double pos = std::count(labels.begin(), labels.end(), 1);
  const double neg = labels.size() - pos;
  double best = -1.0;
  for (double t : cuts) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (labels[i] == 1 ? tp : fp) += 1;
    }
    best = std::max(best, tp / pos - fp / neg);
  }
  return best;
}

}  // namespace snapgap::testing

#endif  // SNAPGAP_TESTS_ORACLES_H_
