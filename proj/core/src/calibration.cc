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

#include "snapgap/calibration.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "snapgap/error.h"

namespace snapgap {
namespace {

struct TieGroup {
  double score;
  double sum;
  double weight;
};

// Groups of equal score in ascending order, plus each input's group index.
std::vector<TieGroup> GroupTies(std::span<const double> scores,
                                std::span<const double> targets,
                                std::vector<std::size_t>* group_of) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<TieGroup> groups;
  if (group_of) group_of->assign(scores.size(), 0);
  for (std::size_t i : order) {
    if (groups.empty() || groups.back().score != scores[i]) {
      groups.push_back({scores[i], 0.0, 0.0});
    }
    groups.back().sum += targets[i];
    groups.back().weight += 1.0;
    if (group_of) (*group_of)[i] = groups.size() - 1;
  }
  return groups;
}

struct Block {
  double sum;
  double weight;
  std::size_t first;  // tie-group range [first, last]
  std::size_t last;
  double Mean() const { return sum / weight; }
};

std::vector<Block> Pav(const std::vector<TieGroup>& groups) {
  std::vector<Block> blocks;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    blocks.push_back({groups[g].sum, groups[g].weight, g, g});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].Mean() > blocks.back().Mean()) {
      Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      prev.sum += top.sum;
      prev.weight += top.weight;
      prev.last = top.last;
    }
  }
  return blocks;
}

void CheckInputs(std::span<const double> scores, std::size_t targets) {
  if (scores.size() != targets) {
    throw Error(ErrorKind::kInvalidParams, "scores and labels differ in length");
  }
  if (scores.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "isotonic fit needs at least two pairs");
  }
}

}  // namespace

double IsotonicMap::Apply(double score) const {
  if (scores.empty()) return 0.0;
  if (score <= scores.front()) return values.front();
  if (score >= scores.back()) return values.back();
  const auto it = std::lower_bound(scores.begin(), scores.end(), score);
  const auto hi = static_cast<std::size_t>(it - scores.begin());
  if (scores[hi] == score) return values[hi];
  const std::size_t lo = hi - 1;
  const double t = (score - scores[lo]) / (scores[hi] - scores[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

std::vector<double> IsotonicMap::Apply(std::span<const double> in) const {
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = Apply(in[i]);
  return out;
}

IsotonicMap FitIsotonic(std::span<const double> scores, std::span<const double> targets) {
  CheckInputs(scores, targets.size());
  const auto groups = GroupTies(scores, targets, nullptr);
  IsotonicMap map;
  map.fitted_on = scores.size();
  for (const Block& b : Pav(groups)) {
    const double v = std::clamp(b.Mean(), 0.0, 1.0);
    map.scores.push_back(groups[b.first].score);
    map.values.push_back(v);
    if (b.last != b.first) {
      map.scores.push_back(groups[b.last].score);
      map.values.push_back(v);
    }
  }
  return map;
}

IsotonicMap FitIsotonic(std::span<const double> scores, std::span<const int> labels) {
  const std::vector<double> targets(labels.begin(), labels.end());
  return FitIsotonic(scores, targets);
}

std::vector<double> IsotonicFittedValues(std::span<const double> scores,
                                         std::span<const double> targets) {
  CheckInputs(scores, targets.size());
  std::vector<std::size_t> group_of;
  const auto groups = GroupTies(scores, targets, &group_of);
  std::vector<double> group_value(groups.size());
  for (const Block& b : Pav(groups)) {
    for (std::size_t g = b.first; g <= b.last; ++g) group_value[g] = b.Mean();
  }
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = group_value[group_of[i]];
  return out;
}

std::string_view PolicyName(ThresholdPolicy policy) {
  switch (policy) {
    case ThresholdPolicy::kPrevalenceAnchored: return "prevalence_anchored";
    case ThresholdPolicy::kYouden: return "youden";
    case ThresholdPolicy::kFixed: return "fixed";
  }
  return "fixed";
}

DecisionRule PrevalenceThreshold(double train_prevalence) {
  if (!(train_prevalence > 0.0 && train_prevalence < 1.0)) {
    throw Error(ErrorKind::kDegeneratePrevalence, "prevalence must lie in (0, 1)");
  }
  return {ThresholdPolicy::kPrevalenceAnchored, train_prevalence, train_prevalence};
}

DecisionRule YoudenThreshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidParams, "scores and labels differ in length");
  }
  std::vector<double> targets(labels.begin(), labels.end());
  const auto groups = GroupTies(scores, targets, nullptr);
  double total_pos = 0.0, total = 0.0;
  for (const auto& g : groups) {
    total_pos += g.sum;
    total += g.weight;
  }
  const double total_neg = total - total_pos;
  if (total_pos == 0.0 || total_neg == 0.0) {
    throw Error(ErrorKind::kSingleClass, "Youden threshold needs both classes");
  }

  // Cutpoint k flags groups [k, m). k = 0 flags everything; k = m flags none.
  const std::size_t m = groups.size();
  std::vector<double> suffix_pos(m + 1, 0.0), suffix_all(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    suffix_pos[k] = suffix_pos[k + 1] + groups[k].sum;
    suffix_all[k] = suffix_all[k + 1] + groups[k].weight;
  }
  auto cutpoint = [&](std::size_t k) {
    if (k == 0) return groups.front().score;
    if (k == m) {
      return std::nextafter(groups.back().score, std::numeric_limits<double>::infinity());
    }
    const double lo = groups[k - 1].score, hi = groups[k].score;
    const double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
  };
  double best_j = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double tpr = suffix_pos[k] / total_pos;
    const double fpr = (suffix_all[k] - suffix_pos[k]) / total_neg;
    const double j = tpr - fpr;
    if (j >= best_j) {
      best_j = j;
      best_k = k;
    }
  }
  return {ThresholdPolicy::kYouden, cutpoint(best_k), std::nullopt};
}

double YoudenJ(std::span<const double> scores, std::span<const int> labels,
               double threshold) {
  double tp = 0, fp = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool flag = scores[i] >= threshold;
    if (labels[i] == 1) {
      ++pos;
      tp += flag;
    } else {
      ++neg;
      fp += flag;
    }
  }
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::kSingleClass, "Youden J needs both classes");
  }
  return tp / pos - fp / neg;
}

std::vector<int> Classify(std::span<const double> probabilities, const DecisionRule& rule) {
  std::vector<int> out(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    out[i] = probabilities[i] >= rule.threshold ? 1 : 0;
  }
  return out;
}

std::vector<ReliabilityBin> ReliabilityCurve(std::span<const double> probabilities,
                                             std::span<const int> labels, int bins) {
  if (bins < 1) throw Error(ErrorKind::kInvalidParams, "need at least one bin");
  std::vector<double> sum_p(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> sum_y(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], 0.0, 1.0);
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(p * bins),
                                         static_cast<std::size_t>(bins - 1));
    sum_p[b] += p;
    sum_y[b] += labels[i];
    ++count[b];
  }
  std::vector<ReliabilityBin> out;
  for (std::size_t b = 0; b < count.size(); ++b) {
    if (count[b] == 0) continue;
    out.push_back({(static_cast<double>(b) + 0.5) / bins, sum_p[b] / count[b],
                   sum_y[b] / count[b], count[b]});
  }
  return out;
}

double MeanCalibrationGap(std::span<const ReliabilityBin> bins) {
  if (bins.empty()) return 0.0;
  double gap = 0.0;
  for (const auto& b : bins) gap += std::abs(b.observed_rate - b.mean_predicted);
  return gap / static_cast<double>(bins.size());
}

}  // namespace snapgap
