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

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "snapgap/csv.h"
#include "snapgap/error.h"

namespace snapgap {

void LabelConfig::Validate() const {
  if (!(lo_q > 0.0 && lo_q < hi_q && hi_q < 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "quantile levels need 0 < lo_q < hi_q < 1");
  }
  if (!(poverty_floor >= 0.0 && poverty_floor < 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "poverty_floor must lie in [0, 1)");
  }
}

UptakeRatio ComputeUptake(double snap_fam, double pov_fam) {
  if (!(pov_fam > 0.0)) {
    throw Error(ErrorKind::kZeroPoverty, "poverty count is zero");
  }
  UptakeRatio u;
  u.raw = snap_fam / pov_fam;
  u.capped = std::min(u.raw, 1.0);
  u.anomaly = u.raw > 1.0;
  return u;
}

std::optional<double> PovertyRate(const ZipRecord& record) {
  if (record.poverty_rate) return record.poverty_rate;
  if (record.pov_fam && record.fam_universe && *record.fam_universe > 0.0) {
    return *record.pov_fam / *record.fam_universe;
  }
  return std::nullopt;
}

bool IsEligible(std::optional<double> poverty_rate, std::optional<double> uptake,
                std::span<const std::optional<double>> predictors,
                const LabelConfig& config) {
  if (!poverty_rate || !(*poverty_rate > 0.0) ||
      *poverty_rate < config.poverty_floor) {
    return false;
  }
  if (!uptake || !std::isfinite(*uptake) || *uptake == 0.0) return false;
  return std::all_of(predictors.begin(), predictors.end(),
                     [](const auto& v) { return v.has_value(); });
}

double Quantile(std::span<const double> values, double q) {
  if (values.empty()) {
    throw Error(ErrorKind::kEmptyInput, "quantile of no values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

const ThresholdSet* LabeledPanel::ThresholdsFor(Area area) const {
  for (const auto& t : thresholds) {
    if (!t.area || *t.area == area) return &t;
  }
  return nullptr;
}

namespace {

std::vector<LabeledRow> PrepareRows(std::span<const ZipRecord> records,
                                    const LabelConfig& config) {
  std::vector<LabeledRow> rows;
  rows.reserve(records.size());
  for (const ZipRecord& rec : records) {
    LabeledRow row;
    row.record = rec;
    row.poverty_rate = PovertyRate(rec);
    if (rec.pov_fam && rec.snap_fam && *rec.pov_fam > 0.0) {
      const UptakeRatio u = ComputeUptake(*rec.snap_fam, *rec.pov_fam);
      row.s_raw = u.raw;
      row.s_capped = u.capped;
    }
    row.eligible = IsEligible(row.poverty_rate, row.Uptake(config.uptake_basis),
                              rec.predictors, config);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<Area> GroupOf(const LabeledRow& row, const LabelConfig& config) {
  if (!config.stratify_by_area) return std::nullopt;
  return row.record.area;
}

void AssignLabels(LabeledPanel& panel) {
  const LabelConfig& config = panel.config;
  panel.eligible = panel.positives = 0;
  for (auto& t : panel.thresholds) t.eligible = t.positives = 0;
  for (LabeledRow& row : panel.rows) {
    if (!row.eligible) {
      row.y = Label::kMissing;
      continue;
    }
    const auto group = GroupOf(row, config);
    auto it = std::find_if(panel.thresholds.begin(), panel.thresholds.end(),
                           [&](const ThresholdSet& t) { return t.area == group; });
    if (it == panel.thresholds.end()) {
      throw Error(ErrorKind::kInvalidConfig,
                  "no thresholds for area " +
                      std::string(AreaName(group.value_or(Area::kUnknown))));
    }
    const double p = *row.poverty_rate;
    const double s = *row.Uptake(config.uptake_basis);
    const bool positive = p >= it->tau_hi && s <= it->tau_lo;
    row.y = positive ? Label::kPositive : Label::kNegative;
    ++it->eligible;
    ++panel.eligible;
    if (positive) {
      ++it->positives;
      ++panel.positives;
    }
  }
  for (auto& t : panel.thresholds) {
    t.prevalence = t.eligible ? static_cast<double>(t.positives) / t.eligible : 0.0;
  }
  panel.prevalence =
      panel.eligible ? static_cast<double>(panel.positives) / panel.eligible : 0.0;
}

}  // namespace

LabeledPanel BuildLabels(std::span<const ZipRecord> records,
                         const LabelConfig& config) {
  config.Validate();
  LabeledPanel panel;
  panel.config = config;
  panel.rows = PrepareRows(records, config);

  std::map<std::optional<Area>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const LabeledRow& row : panel.rows) {
    if (!row.eligible) continue;
    auto& [p, s] = groups[GroupOf(row, config)];
    p.push_back(*row.poverty_rate);
    s.push_back(*row.Uptake(config.uptake_basis));
  }
  if (groups.empty()) {
    throw Error(ErrorKind::kNoEligibleRows, "no row passes the eligibility filters");
  }
  for (const auto& [area, values] : groups) {
    ThresholdSet t;
    t.area = area;
    t.tau_hi = Quantile(values.first, config.hi_q);
    t.tau_lo = Quantile(values.second, config.lo_q);
    panel.thresholds.push_back(t);
  }
  AssignLabels(panel);
  return panel;
}

LabeledPanel ApplyThresholds(std::span<const ZipRecord> records,
                             const LabelConfig& config,
                             std::span<const ThresholdSet> thresholds) {
  config.Validate();
  LabeledPanel panel;
  panel.config = config;
  panel.rows = PrepareRows(records, config);
  panel.thresholds.assign(thresholds.begin(), thresholds.end());
  AssignLabels(panel);
  return panel;
}

OlsFit FitOls(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kInvalidParams, "x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::kDegenerateDesign, "fewer than two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::kDegenerateDesign, "all x values are equal");
  }
  OlsFit fit;
  fit.beta = sxy / sxx;
  fit.alpha = my - fit.beta * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = fit.Residual(x[i], y[i]);
    ssr += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return fit;
}

OlsFit AttachResiduals(LabeledPanel& panel) {
  std::vector<double> x, y;
  for (const LabeledRow& row : panel.rows) {
    if (!row.eligible) continue;
    x.push_back(*row.record.pov_fam);
    y.push_back(*row.record.snap_fam);
  }
  const OlsFit fit = FitOls(x, y);
  for (LabeledRow& row : panel.rows) {
    row.residual.reset();
    if (row.eligible) {
      row.residual = fit.Residual(*row.record.pov_fam, *row.record.snap_fam);
    }
  }
  return fit;
}

std::vector<HiddenFragility> FlagHiddenFragility(const LabeledPanel& panel,
                                                 double tail_fraction) {
  std::vector<const LabeledRow*> with_residual;
  for (const LabeledRow& row : panel.rows) {
    if (row.residual) with_residual.push_back(&row);
  }
  if (tail_fraction <= 0.0 || with_residual.empty()) return {};
  std::sort(with_residual.begin(), with_residual.end(),
            [](const LabeledRow* a, const LabeledRow* b) {
              if (*a->residual != *b->residual) return *a->residual < *b->residual;
              if (a->record.zip != b->record.zip) return a->record.zip < b->record.zip;
              return a->record.year < b->record.year;
            });
  const auto tail = std::min<std::size_t>(
      with_residual.size(),
      static_cast<std::size_t>(
          std::ceil(tail_fraction * static_cast<double>(with_residual.size()) - 1e-9)));
  std::vector<HiddenFragility> out;
  for (std::size_t i = 0; i < tail; ++i) {
    const LabeledRow& row = *with_residual[i];
    if (*row.residual < 0.0 && row.y != Label::kPositive) {
      out.push_back({row.record.zip, row.record.year, *row.residual});
    }
  }
  return out;
}

void WriteLabeledPanel(std::ostream& out, const LabeledPanel& panel) {
  std::vector<std::string> header = {"zip", "year", "pov_fam", "snap_fam",
                                     "fam_universe", "poverty_rate"};
  for (auto name : kPredictorNames) header.emplace_back(name);
  for (const char* name : {"p", "s_raw", "s_capped", "eligible", "y", "residual",
                           "area", "flags"}) {
    header.emplace_back(name);
  }
  csv::WriteRow(out, header);
  for (const LabeledRow& row : panel.rows) {
    const ZipRecord& r = row.record;
    std::vector<std::string> fields = {r.zip,
                                       std::to_string(r.year),
                                       csv::FormatOptional(r.pov_fam),
                                       csv::FormatOptional(r.snap_fam),
                                       csv::FormatOptional(r.fam_universe),
                                       csv::FormatOptional(r.poverty_rate)};
    for (const auto& p : r.predictors) fields.push_back(csv::FormatOptional(p));
    fields.push_back(csv::FormatOptional(row.poverty_rate));
    fields.push_back(csv::FormatOptional(row.s_raw));
    fields.push_back(csv::FormatOptional(row.s_capped));
    fields.emplace_back(row.eligible ? "1" : "0");
    fields.emplace_back(row.y == Label::kMissing    ? "NA"
                        : row.y == Label::kPositive ? "1"
                                                    : "0");
    fields.push_back(csv::FormatOptional(row.residual));
    fields.emplace_back(AreaName(r.area));
    fields.push_back(r.flags.ToString());
    csv::WriteRow(out, fields);
  }
}

}  // namespace snapgap
