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

#include "snapgap/pipeline.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "snapgap/digest.h"
#include "snapgap/error.h"
#include "snapgap/parallel.h"
#include "snapgap/random.h"
#include "snapgap/serialization.h"
#include "snapgap/version.h"

namespace snapgap {

using nlohmann::json;

std::string_view AreaModeName(AreaMode mode) {
  return mode == AreaMode::kPooled ? "pooled" : "stratified";
}

std::string_view ThresholdModeName(ThresholdMode mode) {
  return mode == ThresholdMode::kRefit ? "refit" : "frozen";
}

std::string_view EvalPathName(EvalPath path) {
  return path == EvalPath::kMultivariate ? "multivariate" : "univariate";
}

std::vector<FeatureSubset> AllFeatureSubsets() {
  std::vector<FeatureSubset> out;
  for (unsigned mask = 1; mask < (1u << kNumPredictors); ++mask) {
    FeatureSubset s;
    for (std::size_t j = 0; j < kNumPredictors; ++j) {
      if (mask & (1u << j)) s.push_back(j);
    }
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<FeatureSubset> SingletonSubsets() {
  std::vector<FeatureSubset> out;
  for (std::size_t j = 0; j < kNumPredictors; ++j) out.push_back({j});
  return out;
}

std::string SubsetTag(const FeatureSubset& subset) {
  std::string tag;
  for (std::size_t j : subset) {
    if (!tag.empty()) tag += '+';
    tag += kPredictorNames.at(j);
  }
  return tag;
}

void BacktestConfig::Validate() const {
  auto invalid = [](const std::string& msg) { throw Error(ErrorKind::kInvalidConfig, msg); };
  if (p1.first > p1.last || p2.first > p2.last) invalid("year range ends before it starts");
  if (p1.last >= p2.first) {
    throw Error(ErrorKind::kPeriodsOverlap,
                "training years must end before the test years begin");
  }
  label.Validate();
  if (folds < 2) invalid("folds must be at least 2");
  if (families.empty()) invalid("no model family selected");
  auto check_subsets = [&](const std::vector<FeatureSubset>& subsets) {
    for (const FeatureSubset& s : subsets) {
      if (s.empty()) invalid("empty feature subset");
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= kNumPredictors) invalid("feature index out of range");
        if (i > 0 && s[i] <= s[i - 1]) invalid("feature subset must be ascending and unique");
      }
    }
  };
  check_subsets(feature_subsets);
  check_subsets(tree_feature_subsets);
  for (const auto& [family, grid] : grids) {
    if (grid.empty()) invalid("empty grid for " + std::string(FamilyName(family)));
  }
  if (importance_repeats < 1) invalid("importance_repeats must be at least 1");
  if (reliability_bins < 1) invalid("reliability_bins must be at least 1");
  if (!(hidden_tail >= 0.0 && hidden_tail <= 1.0)) invalid("hidden_tail must lie in [0, 1]");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    invalid("holdout_fraction must lie in (0, 1)");
  }
}

std::vector<FeatureSubset> BacktestConfig::SubsetsFor(ModelFamily family) const {
  if (family == ModelFamily::kLogistic) {
    return feature_subsets.empty() ? AllFeatureSubsets() : feature_subsets;
  }
  if (!tree_feature_subsets.empty()) return tree_feature_subsets;
  return {FeatureSubset{0, 1, 2, 3}};
}

std::vector<Hyperparameters> BacktestConfig::GridFor(ModelFamily family) const {
  auto it = grids.find(family);
  return it == grids.end() ? DefaultGrid(family) : it->second;
}

json ConfigToJson(const BacktestConfig& c) {
  json families = json::array(), subsets = json::object(), grids = json::object();
  for (ModelFamily f : c.families) {
    const std::string name(FamilyName(f));
    families.push_back(name);
    json list = json::array();
    for (const FeatureSubset& s : c.SubsetsFor(f)) list.push_back(SubsetTag(s));
    subsets[name] = list;
    grids[name] = c.GridFor(f);
  }
  return json{
      {"p1_years", {c.p1.first, c.p1.last}},
      {"p2_years", {c.p2.first, c.p2.last}},
      {"label",
       {{"poverty_floor", c.label.poverty_floor},
        {"hi_q", c.label.hi_q},
        {"lo_q", c.label.lo_q},
        {"uptake_basis", c.label.uptake_basis == UptakeBasis::kCapped ? "capped" : "raw"}}},
      {"families", families},
      {"feature_subsets", subsets},
      {"grids", grids},
      {"folds", c.folds},
      {"seed", c.seed},
      {"area_mode", AreaModeName(c.area_mode)},
      {"threshold_mode", ThresholdModeName(c.threshold_mode)},
      {"eval_path", EvalPathName(c.eval_path)},
      {"weighting", c.weighting == ClassWeighting::kBalanced ? "balanced" : "none"},
      {"importance_repeats", c.importance_repeats},
      {"reliability_bins", c.reliability_bins},
      {"hidden_tail", c.hidden_tail},
      {"holdout_fraction", c.holdout_fraction},
  };
}

namespace {

constexpr std::array<Area, 3> kModeledAreas = {Area::kUrban, Area::kRural, Area::kMixed};

std::vector<ZipRecord> SelectYears(std::span<const ZipRecord> panel, YearRange range) {
  std::vector<ZipRecord> out;
  for (const ZipRecord& r : panel) {
    if (range.Contains(r.year)) out.push_back(r);
  }
  return out;
}

bool IsAnomaly(const LabeledRow& row) {
  return row.record.flags.Has(RecordFlag::kSnapExceedsPoverty) ||
         (row.s_raw && *row.s_raw > 1.0);
}

PeriodSummary Summarize(const std::string& name, YearRange years, LabeledPanel& labeled,
                        double hidden_tail) {
  PeriodSummary s;
  s.name = name;
  s.years = years;
  s.thresholds = labeled.thresholds;
  s.rows = labeled.rows.size();
  s.eligible = labeled.eligible;
  s.positives = labeled.positives;
  s.prevalence = labeled.prevalence;
  for (const LabeledRow& row : labeled.rows) s.anomalies += IsAnomaly(row);
  try {
    s.ols = AttachResiduals(labeled);
    s.hidden_fragility = FlagHiddenFragility(labeled, hidden_tail);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateDesign) throw;
  }
  return s;
}

// Eligible, area-designated rows of one cohort, with all four predictors.
struct Design {
  FeatureMatrix x;
  std::vector<int> y;
  std::vector<const LabeledRow*> rows;
  std::size_t positives = 0;
};

Design BuildDesign(const LabeledPanel& panel, std::optional<Area> area) {
  Design d;
  for (const LabeledRow& row : panel.rows) {
    if (!row.eligible || row.record.area == Area::kUnknown) continue;
    if (area && row.record.area != *area) continue;
    d.rows.push_back(&row);
  }
  d.x = FeatureMatrix(d.rows.size(), kNumPredictors,
                      std::vector<std::string>(kPredictorNames.begin(), kPredictorNames.end()));
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const LabeledRow& row = *d.rows[i];
    for (std::size_t j = 0; j < kNumPredictors; ++j) d.x(i, j) = *row.record.predictors[j];
    d.y.push_back(row.y == Label::kPositive ? 1 : 0);
    d.positives += d.y.back();
  }
  return d;
}

FeatureMatrix SelectColumns(const FeatureMatrix& x, const FeatureSubset& subset) {
  std::vector<std::string> names;
  for (std::size_t j : subset) names.push_back(x.names()[j]);
  FeatureMatrix out(x.rows(), subset.size(), std::move(names));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < subset.size(); ++k) out(i, k) = x(i, subset[k]);
  }
  return out;
}

// Per class, shuffle and send round(fraction * n_c) rows (at least one) to
// the holdout side.
std::vector<bool> StratifiedHoldout(std::span<const int> labels, double fraction,
                                    std::uint64_t seed) {
  std::vector<bool> holdout(labels.size(), false);
  RandomEngine rng(DeriveSeed(seed, "holdout"));
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    Shuffle(members, rng);
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * members.size())));
    for (std::size_t k = 0; k < std::min(take, members.size()); ++k) holdout[members[k]] = true;
  }
  return holdout;
}

struct Task {
  std::optional<Area> area;
  ModelFamily family;
  FeatureSubset subset;
};

std::string CohortName(const std::optional<Area>& area) {
  return area ? std::string(AreaName(*area)) : "All";
}

std::string ModelName(ModelFamily family, const FeatureSubset& subset) {
  return std::string(FamilyName(family)) + "[" + SubsetTag(subset) + "]";
}

std::uint64_t TaskSeed(std::uint64_t root, ModelFamily family, const FeatureSubset& subset) {
  return DeriveSeed(root, std::string(FamilyName(family)) + "|" + SubsetTag(subset));
}

TrainedModel Train(const BacktestConfig& config, const Design& design, const Task& task) {
  TrainedModel m;
  m.cohort = CohortName(task.area);
  m.area = task.area;
  m.family = task.family;
  m.features = task.subset;
  m.name = ModelName(task.family, task.subset);
  m.train_rows = design.y.size();
  m.train_positives = design.positives;
  m.train_prevalence =
      m.train_rows ? static_cast<double>(m.train_positives) / m.train_rows : 0.0;

  const std::uint64_t seed = TaskSeed(config.seed, task.family, task.subset);
  const FeatureMatrix x = SelectColumns(design.x, task.subset);
  const CvOptions cv_options{config.folds, DeriveSeed(seed, "cv"), config.weighting, 1};
  const std::vector<Hyperparameters> grid = config.GridFor(task.family);

  m.scorer.root_seed = seed;
  if (config.eval_path == EvalPath::kMultivariate) {
    const CvGridResult cv = CvGridSearch(task.family, x, design.y, grid, cv_options);
    m.grid = cv.grid;
    m.winner = cv.winner;
    m.scorer.calibration = FitIsotonic(cv.oof_scores, design.y);
    m.scorer.model = FitModel({task.family, cv.winner, config.weighting}, x, design.y,
                              DeriveSeed(seed, "final"));
    m.scorer.rule = PrevalenceThreshold(m.train_prevalence);
  } else {
    const std::vector<bool> holdout =
        StratifiedHoldout(design.y, config.holdout_fraction, DeriveSeed(seed, "split"));
    std::vector<std::size_t> fit_rows, hold_rows;
    for (std::size_t i = 0; i < holdout.size(); ++i) {
      (holdout[i] ? hold_rows : fit_rows).push_back(i);
    }
    const FeatureMatrix x_fit = x.SelectRows(fit_rows);
    const FeatureMatrix x_hold = x.SelectRows(hold_rows);
    std::vector<int> y_fit, y_hold;
    for (std::size_t i : fit_rows) y_fit.push_back(design.y[i]);
    for (std::size_t i : hold_rows) y_hold.push_back(design.y[i]);
    const CvGridResult cv = CvGridSearch(task.family, x_fit, y_fit, grid, cv_options);
    m.grid = cv.grid;
    m.winner = cv.winner;
    m.scorer.model = FitModel({task.family, cv.winner, config.weighting}, x_fit, y_fit,
                              DeriveSeed(seed, "final"));
    m.scorer.rule = YoudenThreshold(m.scorer.RawScores(x_hold), y_hold);
  }
  m.scorer.hyper = m.winner;
  return m;
}

CohortResult Evaluate(const BacktestConfig& config, TrainedModel model, const Design& test,
                      const std::string& period) {
  CohortResult r;
  const FeatureMatrix x = SelectColumns(test.x, model.features);
  const std::vector<double> probs = model.scorer.Probabilities(x);
  const std::string cohort =
      model.area ? period + "/" + std::string(AreaName(*model.area)) : period;
  r.report = snapgap::Evaluate(probs, test.y, model.scorer.rule, model.name, cohort);
  const CalibratedScorer& scorer = model.scorer;
  r.importance = PermutationImportance(
      [&scorer](const FeatureMatrix& m) { return scorer.Probabilities(m); }, x, test.y,
      ImportanceMetric::kAuc, config.importance_repeats,
      DeriveSeed(scorer.root_seed, "importance"), 1);
  r.reliability = ReliabilityCurve(probs, test.y, config.reliability_bins);
  r.calibration_gap = MeanCalibrationGap(r.reliability);
  const std::vector<int> decisions = Classify(probs, model.scorer.rule);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!decisions[i]) continue;
    const LabeledRow& row = *test.rows[i];
    r.flagged.push_back({row.record.zip, row.record.year, probs[i], test.y[i]});
  }
  std::sort(r.flagged.begin(), r.flagged.end(), [](const FlaggedZip& a, const FlaggedZip& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.zip != b.zip) return a.zip < b.zip;
    return a.year < b.year;
  });
  r.model = std::move(model);
  return r;
}

std::string FailureKind(ErrorKind kind) {
  return ExitCodeFor(kind) == 3 || kind == ErrorKind::kDegeneratePrevalence ||
                 kind == ErrorKind::kInsufficientData
             ? std::string(ErrorKindName(ErrorKind::kInsufficientCohort))
             : std::string(ErrorKindName(kind));
}

LabelConfig LabelConfigFor(const BacktestConfig& config) {
  LabelConfig label = config.label;
  label.stratify_by_area = config.area_mode == AreaMode::kStratified;
  return label;
}

std::vector<std::optional<Area>> Cohorts(const BacktestConfig& config,
                                         const LabeledPanel& train,
                                         const LabeledPanel* test) {
  if (config.area_mode == AreaMode::kPooled) return {std::nullopt};
  std::set<Area> present;
  for (const LabeledPanel* panel : {&train, test}) {
    if (!panel) continue;
    for (const LabeledRow& row : panel->rows) {
      if (row.eligible && row.record.area != Area::kUnknown) present.insert(row.record.area);
    }
  }
  std::vector<std::optional<Area>> out;
  for (Area a : kModeledAreas) {
    if (present.count(a)) out.emplace_back(a);
  }
  return out;
}

struct TaskOutcome {
  std::optional<CohortResult> result;
  std::optional<TrainedModel> model;
  std::optional<CohortFailure> failure;
};

// Trains (and, with a test panel, evaluates) every task. Results come back in
// task order regardless of thread count.
std::vector<TaskOutcome> RunTasks(const BacktestConfig& config, const LabeledPanel& train,
                                  const LabeledPanel* test,
                                  std::vector<CohortFailure>& failures) {
  std::vector<Task> tasks;
  std::map<std::optional<Area>, Design> train_designs, test_designs;
  for (const auto& area : Cohorts(config, train, test)) {
    Design tr = BuildDesign(train, area);
    std::optional<Design> te;
    if (test) te = BuildDesign(*test, area);
    const std::string cohort = CohortName(area);
    auto fail = [&](const std::string& msg) {
      failures.push_back({cohort, "*", std::string(ErrorKindName(ErrorKind::kInsufficientCohort)),
                          msg});
    };
    const std::size_t tr_neg = tr.y.size() - tr.positives;
    if (tr.positives == 0 || tr_neg == 0) {
      fail("training cohort " + cohort + " has " + std::to_string(tr.positives) +
           " positives and " + std::to_string(tr_neg) + " negatives");
      continue;
    }
    if (te && (te->positives == 0 || te->positives == te->y.size())) {
      fail("test cohort " + cohort + " has " + std::to_string(te->positives) +
           " positives among " + std::to_string(te->y.size()) + " rows");
      continue;
    }
    for (ModelFamily family : config.families) {
      for (const FeatureSubset& subset : config.SubsetsFor(family)) {
        tasks.push_back({area, family, subset});
      }
    }
    train_designs.emplace(area, std::move(tr));
    if (te) test_designs.emplace(area, std::move(*te));
  }

  std::vector<TaskOutcome> outcomes(tasks.size());
  ParallelFor(tasks.size(), config.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      TrainedModel model = Train(config, train_designs.at(task.area), task);
      if (test) {
        outcomes[i].result = Evaluate(config, std::move(model), test_designs.at(task.area), "P2");
      } else {
        outcomes[i].model = std::move(model);
      }
    } catch (const Error& e) {
      outcomes[i].failure = CohortFailure{CohortName(task.area),
                                          ModelName(task.family, task.subset),
                                          FailureKind(e.kind()), e.what()};
    }
  });
  return outcomes;
}

std::string PanelDigest(std::span<const ZipRecord> panel) {
  std::ostringstream out;
  WritePanel(out, panel);
  return Sha256Hex(out.str());
}

}  // namespace

std::vector<AreaDistributionRow> FragileDistribution(const LabeledPanel& pooled) {
  const ThresholdSet* t = nullptr;
  for (const ThresholdSet& ts : pooled.thresholds) {
    if (!ts.area) t = &ts;
  }
  std::vector<AreaDistributionRow> rows;
  for (Area a : {Area::kUrban, Area::kRural, Area::kMixed, Area::kUnknown}) {
    rows.push_back({});
    rows.back().area = a;
  }
  if (!t) return rows;
  const UptakeBasis basis = pooled.config.uptake_basis;
  std::vector<double> uptake;
  for (const LabeledRow& row : pooled.rows) {
    if (row.eligible) uptake.push_back(*row.Uptake(basis));
  }
  if (uptake.empty()) return rows;
  const double cut10 = Quantile(uptake, 0.10);
  const double cut30 = Quantile(uptake, 0.30);
  std::size_t total = 0, total10 = 0, total30 = 0;
  for (const LabeledRow& row : pooled.rows) {
    if (!row.eligible) continue;
    auto& r = rows[static_cast<std::size_t>(row.record.area)];
    const bool high = *row.poverty_rate >= t->tau_hi;
    const double s = *row.Uptake(basis);
    ++r.eligible;
    ++total;
    if (high && s <= cut10) {
      ++r.bottom10;
      ++total10;
    }
    if (high && s <= cut30) {
      ++r.bottom30;
      ++total30;
    }
  }
  auto share = [](std::size_t k, std::size_t n) {
    return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
  };
  for (auto& r : rows) {
    r.eligible_share = share(r.eligible, total);
    r.bottom10_share = share(r.bottom10, total10);
    r.bottom30_share = share(r.bottom30, total30);
  }
  return rows;
}

std::vector<YearDiagnostics> RunYearlyDiagnostics(const BacktestConfig& config,
                                                  std::span<const ZipRecord> panel) {
  std::set<int> years;
  for (int y = config.p1.first; y <= config.p2.last; ++y) years.insert(y);
  for (const ZipRecord& r : panel) years.insert(r.year);
  LabelConfig label = config.label;
  label.stratify_by_area = false;
  std::vector<YearDiagnostics> out;
  for (int year : years) {
    YearDiagnostics d;
    d.year = year;
    std::vector<ZipRecord> records;
    for (const ZipRecord& r : panel) {
      if (r.year == year) records.push_back(r);
    }
    d.rows = records.size();
    if (!records.empty()) {
      try {
        const LabeledPanel labeled = BuildLabels(records, label);
        d.eligible = labeled.eligible;
        d.tau_hi = labeled.thresholds.front().tau_hi;
        d.tau_lo = labeled.thresholds.front().tau_lo;
        d.prevalence = labeled.prevalence;
        for (const LabeledRow& row : labeled.rows) d.anomalies += IsAnomaly(row);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoEligibleRows) throw;
        for (const ZipRecord& r : records) {
          d.anomalies += r.flags.Has(RecordFlag::kSnapExceedsPoverty);
        }
      }
    }
    out.push_back(d);
  }
  return out;
}

TrainingResult TrainModels(const BacktestConfig& config, std::span<const ZipRecord> panel) {
  config.Validate();
  const std::vector<ZipRecord> p1_records = SelectYears(panel, config.p1);
  LabeledPanel p1 = BuildLabels(p1_records, LabelConfigFor(config));
  TrainingResult out;
  out.p1 = Summarize("P1", config.p1, p1, config.hidden_tail);
  for (TaskOutcome& o : RunTasks(config, p1, nullptr, out.failures)) {
    if (o.model) out.models.push_back(std::move(*o.model));
    if (o.failure) out.failures.push_back(std::move(*o.failure));
  }
  return out;
}

RunManifest RunBacktest(const BacktestConfig& config, std::span<const ZipRecord> panel) {
  config.Validate();
  const LabelConfig label = LabelConfigFor(config);
  const std::vector<ZipRecord> p1_records = SelectYears(panel, config.p1);
  const std::vector<ZipRecord> p2_records = SelectYears(panel, config.p2);

  LabeledPanel p1 = BuildLabels(p1_records, label);
  LabeledPanel p2 = config.threshold_mode == ThresholdMode::kRefit
                        ? BuildLabels(p2_records, label)
                        : ApplyThresholds(p2_records, label, p1.thresholds);
  if (p2.eligible == 0) {
    throw Error(ErrorKind::kNoEligibleRows, "no eligible row in the test period");
  }

  RunManifest m;
  m.version = std::string(kVersion);
  m.config = ConfigToJson(config);
  m.config_hash = Sha256Hex(m.config.dump());
  m.input_digests["panel"] = PanelDigest(panel);
  m.periods.push_back(Summarize("P1", config.p1, p1, config.hidden_tail));
  m.periods.push_back(Summarize("P2", config.p2, p2, config.hidden_tail));

  for (TaskOutcome& o : RunTasks(config, p1, &p2, m.failures)) {
    if (o.result) m.results.push_back(std::move(*o.result));
    if (o.failure) m.failures.push_back(std::move(*o.failure));
  }

  LabelConfig pooled_label = config.label;
  pooled_label.stratify_by_area = false;
  const bool pooled_labels =
      config.threshold_mode == ThresholdMode::kRefit && !label.stratify_by_area;
  m.area_distribution =
      FragileDistribution(pooled_labels ? p2 : BuildLabels(p2_records, pooled_label));
  m.yearly = RunYearlyDiagnostics(config, panel);
  return m;
}

RunManifest RunAreaStratified(BacktestConfig config, std::span<const ZipRecord> panel) {
  config.area_mode = AreaMode::kStratified;
  return RunBacktest(config, panel);
}

namespace {

json OptionalJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json PeriodJson(const PeriodSummary& p) {
  json hidden = json::array();
  for (const auto& h : p.hidden_fragility) hidden.push_back(h);
  return json{{"name", p.name},
              {"years", {p.years.first, p.years.last}},
              {"thresholds", p.thresholds},
              {"rows", p.rows},
              {"eligible", p.eligible},
              {"positives", p.positives},
              {"prevalence", p.prevalence},
              {"anomalies", p.anomalies},
              {"ols", p.ols ? json(*p.ols) : json(nullptr)},
              {"hidden_fragility", hidden}};
}

json GridJson(const std::vector<GridEntry>& grid) {
  json out = json::array();
  for (const GridEntry& g : grid) {
    out.push_back(json{{"hyperparameters", g.hyper}, {"mean_ap", g.mean_ap},
                       {"fold_aps", g.fold_aps}});
  }
  return out;
}

json ResultJson(const CohortResult& r) {
  const TrainedModel& m = r.model;
  json features = json::array();
  for (std::size_t j : m.features) features.push_back(kPredictorNames[j]);
  json flagged = json::array();
  for (const FlaggedZip& f : r.flagged) {
    flagged.push_back(json{{"zip", f.zip}, {"year", f.year}, {"probability", f.probability},
                           {"label", f.label}});
  }
  return json{{"cohort", r.report.cohort},
              {"area", m.cohort},
              {"family", FamilyName(m.family)},
              {"features", features},
              {"name", m.name},
              {"grid", GridJson(m.grid)},
              {"winner", m.winner},
              {"train_rows", m.train_rows},
              {"train_positives", m.train_positives},
              {"train_prevalence", m.train_prevalence},
              {"model", ScorerToJson(m.scorer)},
              {"report", r.report},
              {"importance", r.importance},
              {"reliability", r.reliability},
              {"calibration_gap", r.calibration_gap},
              {"flagged", flagged}};
}

json ManifestBody(const RunManifest& m) {
  json periods = json::array(), results = json::array(), failures = json::array(),
       areas = json::array(), yearly = json::array();
  for (const auto& p : m.periods) periods.push_back(PeriodJson(p));
  for (const auto& r : m.results) results.push_back(ResultJson(r));
  for (const auto& f : m.failures) {
    failures.push_back(json{{"cohort", f.cohort}, {"model", f.model}, {"kind", f.kind},
                            {"message", f.message}});
  }
  for (const auto& a : m.area_distribution) {
    areas.push_back(json{{"area", AreaName(a.area)},
                         {"eligible", a.eligible},
                         {"eligible_share", a.eligible_share},
                         {"bottom10", a.bottom10},
                         {"bottom10_share", a.bottom10_share},
                         {"bottom30", a.bottom30},
                         {"bottom30_share", a.bottom30_share}});
  }
  for (const auto& y : m.yearly) {
    yearly.push_back(json{{"year", y.year},
                          {"rows", y.rows},
                          {"eligible", y.eligible},
                          {"tau_hi", OptionalJson(y.tau_hi)},
                          {"tau_lo", OptionalJson(y.tau_lo)},
                          {"prevalence", y.prevalence},
                          {"anomalies", y.anomalies}});
  }
  return json{{"format", kManifestFormat},
              {"version", m.version},
              {"config_hash", m.config_hash},
              {"config", m.config},
              {"inputs", m.input_digests},
              {"periods", periods},
              {"results", results},
              {"failures", failures},
              {"area_distribution", areas},
              {"yearly", yearly}};
}

}  // namespace

json ManifestToJson(const RunManifest& manifest) {
  json body = ManifestBody(manifest);
  const std::string digest = Sha256Hex(body.dump());
  body["digest"] = digest;
  return body;
}

std::string ManifestDigest(const RunManifest& manifest) {
  return Sha256Hex(ManifestBody(manifest).dump());
}

}  // namespace snapgap
