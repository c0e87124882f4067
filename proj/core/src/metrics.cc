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

#include "snapgap/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snapgap/error.h"
#include "snapgap/parallel.h"
#include "snapgap/random.h"

namespace snapgap {
namespace {

void CheckLengths(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidParams, "scores and labels differ in length");
  }
}

std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  CheckLengths(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0, rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share their mean.
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid_rank;
        pos += 1.0;
      }
    }
    i = j;
  }
  const double neg = static_cast<double>(scores.size()) - pos;
  if (pos == 0.0 || neg == 0.0) {
    throw Error(ErrorKind::kSingleClass, "AUC needs both classes");
  }
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double AveragePrecision(std::span<const double> scores, std::span<const int> labels) {
  CheckLengths(scores, labels);
  double total_pos = 0.0;
  for (int y : labels) total_pos += (y == 1);
  if (total_pos == 0.0) throw Error(ErrorKind::kNoPositives, "AP needs a positive");
  const auto order = DescendingOrder(scores);
  double tp = 0.0, seen = 0.0, prev_recall = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      tp += (labels[order[j]] == 1);
      seen += 1.0;
      ++j;
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / seen);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

Confusion ConfusionAt(std::span<const double> probabilities, std::span<const int> labels,
                      const DecisionRule& rule) {
  CheckLengths(probabilities, labels);
  Confusion c;
  const auto decisions = Classify(probabilities, rule);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pos = labels[i] == 1;
    if (decisions[i]) {
      pos ? ++c.tp : ++c.fp;
    } else {
      pos ? ++c.fn : ++c.tn;
    }
  }
  c.flagged = c.tp + c.fp;
  c.precision = c.flagged ? static_cast<double>(c.tp) / c.flagged : 0.0;
  c.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
  c.f1 = (c.precision + c.recall) > 0.0
             ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
             : 0.0;
  c.accuracy = labels.empty() ? 0.0
                              : static_cast<double>(c.tp + c.tn) / labels.size();
  return c;
}

double PrecisionAtK(std::span<const double> scores, std::span<const int> labels,
                    double fraction) {
  CheckLengths(scores, labels);
  if (scores.empty()) throw Error(ErrorKind::kEmptyInput, "no scores");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidParams, "fraction must lie in (0, 1]");
  }
  const double n = static_cast<double>(scores.size());
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * n - 1e-9)), 1, scores.size());
  const auto order = DescendingOrder(scores);
  double hits = 0.0;
  for (std::size_t i = 0; i < k; ++i) hits += (labels[order[i]] == 1);
  return hits / static_cast<double>(k);
}

EvalReport Evaluate(std::span<const double> probabilities, std::span<const int> labels,
                    const DecisionRule& rule, std::string model, std::string cohort) {
  EvalReport r;
  r.model = std::move(model);
  r.cohort = std::move(cohort);
  r.n = labels.size();
  for (int y : labels) r.n_pos += (y == 1);
  r.auc = RocAuc(probabilities, labels);
  r.ap = AveragePrecision(probabilities, labels);
  const Confusion c = ConfusionAt(probabilities, labels, rule);
  r.precision = c.precision;
  r.recall = c.recall;
  r.f1 = c.f1;
  r.accuracy = c.accuracy;
  r.flagged = c.flagged;
  for (double f : kPrecisionAtFractions) {
    r.precision_at[f] = PrecisionAtK(probabilities, labels, f);
  }
  r.rule = rule;
  return r;
}

ImportanceReport PermutationImportance(const Scorer& scorer, const FeatureMatrix& x,
                                       std::span<const int> labels,
                                       ImportanceMetric metric, int repeats,
                                       std::uint64_t seed, int threads) {
  if (repeats < 1) throw Error(ErrorKind::kInvalidParams, "repeats must be >= 1");
  if (x.rows() != labels.size()) {
    throw Error(ErrorKind::kFeatureMismatch, "row count differs from label count");
  }
  const std::vector<double> base = scorer(x);
  const double base_auc = RocAuc(base, labels);
  const double base_ap = AveragePrecision(base, labels);

  const std::size_t d = x.cols();
  const auto r = static_cast<std::size_t>(repeats);
  std::vector<double> drop_auc(d * r), drop_ap(d * r);
  ParallelFor(d * r, threads, [&](std::size_t task) {
    const std::size_t j = task / r;
    const std::size_t rep = task % r;
    RandomEngine rng(DeriveSeed(DeriveSeed(seed, "permute", j), "repeat", rep));
    std::vector<double> column = x.Column(j);
    Shuffle(column, rng);
    FeatureMatrix permuted = x;
    permuted.SetColumn(j, column);
    const std::vector<double> scores = scorer(permuted);
    drop_auc[task] = base_auc - RocAuc(scores, labels);
    drop_ap[task] = base_ap - AveragePrecision(scores, labels);
  });

  ImportanceReport report;
  report.metric = metric;
  for (std::size_t j = 0; j < d; ++j) {
    FeatureImportance f;
    f.name = x.names()[j];
    f.repeats = repeats;
    const auto* chosen = metric == ImportanceMetric::kAuc ? &drop_auc : &drop_ap;
    double mean_auc = 0.0, mean_ap = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      mean_auc += drop_auc[j * r + k];
      mean_ap += drop_ap[j * r + k];
    }
    f.delta_auc = mean_auc / r;
    f.delta_ap = mean_ap / r;
    const double mean = metric == ImportanceMetric::kAuc ? f.delta_auc : f.delta_ap;
    if (r > 1) {
      double ss = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        const double dlt = (*chosen)[j * r + k] - mean;
        ss += dlt * dlt;
      }
      f.dispersion = std::sqrt(ss / static_cast<double>(r - 1));
    }
    report.features.push_back(std::move(f));
  }
  return report;
}

}  // namespace snapgap
