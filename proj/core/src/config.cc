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

#include "snapgap/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "snapgap/csv.h"
#include "snapgap/error.h"

namespace snapgap {

namespace {

constexpr std::string_view kPlainKeys[] = {
    // backtest and labeling
    "p1_years", "p2_years", "poverty_floor", "hi_q", "lo_q", "uptake_basis", "area_mode",
    "threshold_mode", "eval_path", "families", "feature_subsets", "tree_feature_subsets",
    "logistic_grid", "forest_grid", "boosting_grid", "folds", "seed", "weighting",
    "importance_repeats", "reliability_bins", "hidden_tail", "holdout_fraction", "threads",
    // synthetic panels
    "n_zips", "synth_years", "area_mix", "coefficients", "target_prevalence",
    "target_prevalence_end", "anomaly_rate", "area_shift", "base_uptake", "uptake_noise",
    "persistence", "missing_rate",
    // input schema
    "delimiter", "poverty_rate_percent",
    // paths and output
    "panel", "crosswalk", "out", "rejects", "thresholds", "model_dir", "manifest", "truth",
    "format",
};

constexpr std::string_view kColumnFields[] = {
    "zip", "year", "pov_fam", "snap_fam", "fam_universe", "poverty_rate", "area", "flags",
    "pct_no_vehicle", "pct_no_internet", "pct_no_computer", "pct_hs_only",
};

[[noreturn]] void Invalid(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::kInvalidConfig, key + ": " + why);
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(csv::Trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double ToDouble(const std::string& key, std::string_view text) {
  const auto v = csv::ParseDouble(text);
  if (!v) Invalid(key, "expected a number, got '" + std::string(text) + "'");
  return *v;
}

template <typename Int>
Int ToInt(const std::string& key, std::string_view text) {
  text = csv::Trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Invalid(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool ToBool(const std::string& key, std::string_view text) {
  text = csv::Trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  Invalid(key, "expected true or false");
}

std::vector<double> ToDoubles(const std::string& key, std::string_view text) {
  std::vector<double> out;
  for (std::string_view part : Split(text, ',')) out.push_back(ToDouble(key, part));
  return out;
}

template <std::size_t N>
std::array<double, N> ToArray(const std::string& key, std::string_view text) {
  const std::vector<double> v = ToDoubles(key, text);
  if (v.size() != N) Invalid(key, "expected " + std::to_string(N) + " comma-separated values");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

const std::string* Find(const Settings& s, const char* key) {
  auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

std::string NormalizeKey(std::string_view key) {
  std::string out(csv::Trim(key));
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

Settings ParseSettings(std::istream& in) {
  Settings out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = csv::Trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = NormalizeKey(view.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::kParseError, "line " + std::to_string(number) + ": empty key");
    }
    if (!out.emplace(key, std::string(csv::Trim(view.substr(eq + 1)))).second) {
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(number) + ": duplicate key " + key);
    }
  }
  return out;
}

Settings LoadSettings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open config " + path.string());
  return ParseSettings(in);
}

const std::vector<std::string>& KnownKeys() {
  static const std::vector<std::string> keys = [] {
    std::set<std::string> set(std::begin(kPlainKeys), std::end(kPlainKeys));
    for (std::string_view f : kColumnFields) set.insert("column_" + std::string(f));
    return std::vector<std::string>(set.begin(), set.end());
  }();
  return keys;
}

bool IsKnownKey(std::string_view key) {
  const auto& keys = KnownKeys();
  return std::binary_search(keys.begin(), keys.end(), key);
}

void CheckKnownKeys(const Settings& settings) {
  for (const auto& [key, value] : settings) {
    if (!IsKnownKey(key)) throw Error(ErrorKind::kInvalidConfig, "unknown key " + key);
  }
}

YearRange ParseYearRange(std::string_view text) {
  const auto parts = Split(text, '-');
  if (parts.empty() || parts.size() > 2) Invalid("years", "expected FIRST-LAST");
  YearRange r;
  r.first = ToInt<int>("years", parts[0]);
  r.last = parts.size() == 2 ? ToInt<int>("years", parts[1]) : r.first;
  if (r.first > r.last) Invalid("years", "range ends before it starts");
  return r;
}

std::vector<FeatureSubset> ParseFeatureSubsets(std::string_view text) {
  text = csv::Trim(text);
  if (text == "all") return AllFeatureSubsets();
  if (text == "singletons") return SingletonSubsets();
  if (text == "full") return {FeatureSubset{0, 1, 2, 3}};
  std::vector<FeatureSubset> out;
  for (std::string_view group : Split(text, ';')) {
    if (group.empty()) continue;
    FeatureSubset subset;
    for (std::string_view name : Split(group, '+')) {
      const auto it = std::find(kPredictorNames.begin(), kPredictorNames.end(), name);
      if (it == kPredictorNames.end()) {
        Invalid("feature_subsets", "unknown predictor '" + std::string(name) + "'");
      }
      subset.push_back(static_cast<std::size_t>(it - kPredictorNames.begin()));
    }
    std::sort(subset.begin(), subset.end());
    if (std::adjacent_find(subset.begin(), subset.end()) != subset.end()) {
      Invalid("feature_subsets", "predictor repeated within a subset");
    }
    out.push_back(std::move(subset));
  }
  if (out.empty()) Invalid("feature_subsets", "no subset given");
  return out;
}

std::vector<Hyperparameters> ParseGrid(ModelFamily family, std::string_view text) {
  const std::string key = std::string(FamilyName(family)) + " grid";
  std::vector<Hyperparameters> out;
  for (std::string_view point : Split(text, ',')) {
    if (point.empty()) continue;
    Hyperparameters h;
    if (family == ModelFamily::kLogistic) {
      h.c = ToDouble(key, point);
    } else {
      const auto parts = Split(point, ':');
      if (parts.size() != 3) Invalid(key, "expected trees:depth:x, got '" + std::string(point) + "'");
      h.n_trees = ToInt<int>(key, parts[0]);
      h.max_depth = ToInt<int>(key, parts[1]);
      if (family == ModelFamily::kRandomForest) {
        h.min_leaf = ToInt<int>(key, parts[2]);
      } else {
        h.learning_rate = ToDouble(key, parts[2]);
      }
    }
    out.push_back(h);
  }
  if (out.empty()) Invalid(key, "empty grid");
  return out;
}

BacktestConfig BacktestConfigFrom(const Settings& s) {
  BacktestConfig c;
  if (auto v = Find(s, "p1_years")) c.p1 = ParseYearRange(*v);
  if (auto v = Find(s, "p2_years")) c.p2 = ParseYearRange(*v);
  if (auto v = Find(s, "poverty_floor")) c.label.poverty_floor = ToDouble("poverty_floor", *v);
  if (auto v = Find(s, "hi_q")) c.label.hi_q = ToDouble("hi_q", *v);
  if (auto v = Find(s, "lo_q")) c.label.lo_q = ToDouble("lo_q", *v);
  if (auto v = Find(s, "uptake_basis")) {
    if (*v == "capped") {
      c.label.uptake_basis = UptakeBasis::kCapped;
    } else if (*v == "raw") {
      c.label.uptake_basis = UptakeBasis::kRaw;
    } else {
      Invalid("uptake_basis", "expected capped or raw");
    }
  }
  if (auto v = Find(s, "area_mode")) {
    if (*v == "pooled") {
      c.area_mode = AreaMode::kPooled;
    } else if (*v == "stratified") {
      c.area_mode = AreaMode::kStratified;
    } else {
      Invalid("area_mode", "expected pooled or stratified");
    }
  }
  if (auto v = Find(s, "threshold_mode")) {
    if (*v == "refit") {
      c.threshold_mode = ThresholdMode::kRefit;
    } else if (*v == "frozen") {
      c.threshold_mode = ThresholdMode::kFrozen;
    } else {
      Invalid("threshold_mode", "expected refit or frozen");
    }
  }
  if (auto v = Find(s, "eval_path")) {
    if (*v == "multivariate") {
      c.eval_path = EvalPath::kMultivariate;
    } else if (*v == "univariate") {
      c.eval_path = EvalPath::kUnivariate;
    } else {
      Invalid("eval_path", "expected multivariate or univariate");
    }
  }
  if (auto v = Find(s, "families")) {
    c.families.clear();
    for (std::string_view name : Split(*v, ',')) {
      const auto f = ParseFamily(name);
      if (!f) Invalid("families", "unknown family '" + std::string(name) + "'");
      if (std::find(c.families.begin(), c.families.end(), *f) == c.families.end()) {
        c.families.push_back(*f);
      }
    }
  }
  if (auto v = Find(s, "feature_subsets")) c.feature_subsets = ParseFeatureSubsets(*v);
  if (auto v = Find(s, "tree_feature_subsets")) c.tree_feature_subsets = ParseFeatureSubsets(*v);
  if (auto v = Find(s, "logistic_grid")) {
    c.grids[ModelFamily::kLogistic] = ParseGrid(ModelFamily::kLogistic, *v);
  }
  if (auto v = Find(s, "forest_grid")) {
    c.grids[ModelFamily::kRandomForest] = ParseGrid(ModelFamily::kRandomForest, *v);
  }
  if (auto v = Find(s, "boosting_grid")) {
    c.grids[ModelFamily::kGradientBoosting] = ParseGrid(ModelFamily::kGradientBoosting, *v);
  }
  if (auto v = Find(s, "folds")) c.folds = ToInt<int>("folds", *v);
  if (auto v = Find(s, "seed")) c.seed = ToInt<std::uint64_t>("seed", *v);
  if (auto v = Find(s, "weighting")) {
    if (*v == "balanced") {
      c.weighting = ClassWeighting::kBalanced;
    } else if (*v == "none") {
      c.weighting = ClassWeighting::kNone;
    } else {
      Invalid("weighting", "expected balanced or none");
    }
  }
  if (auto v = Find(s, "importance_repeats")) {
    c.importance_repeats = ToInt<int>("importance_repeats", *v);
  }
  if (auto v = Find(s, "reliability_bins")) {
    c.reliability_bins = ToInt<int>("reliability_bins", *v);
  }
  if (auto v = Find(s, "hidden_tail")) c.hidden_tail = ToDouble("hidden_tail", *v);
  if (auto v = Find(s, "holdout_fraction")) {
    c.holdout_fraction = ToDouble("holdout_fraction", *v);
  }
  if (auto v = Find(s, "threads")) {
    c.threads = ToInt<int>("threads", *v);
    if (c.threads < 1) Invalid("threads", "must be at least 1");
  }
  c.Validate();
  return c;
}

SyntheticSpec SyntheticSpecFrom(const Settings& s) {
  SyntheticSpec spec;
  if (auto v = Find(s, "n_zips")) spec.n_zips = ToInt<std::size_t>("n_zips", *v);
  if (auto v = Find(s, "synth_years")) {
    const YearRange r = ParseYearRange(*v);
    spec.first_year = r.first;
    spec.last_year = r.last;
  }
  if (auto v = Find(s, "area_mix")) spec.area_mix = ToArray<4>("area_mix", *v);
  if (auto v = Find(s, "coefficients")) {
    spec.true_coefficients = ToArray<kNumPredictors>("coefficients", *v);
  }
  if (auto v = Find(s, "target_prevalence")) {
    spec.target_prevalence = ToDouble("target_prevalence", *v);
  }
  if (auto v = Find(s, "target_prevalence_end")) {
    spec.target_prevalence_end = ToDouble("target_prevalence_end", *v);
  }
  if (auto v = Find(s, "anomaly_rate")) spec.anomaly_rate = ToDouble("anomaly_rate", *v);
  if (auto v = Find(s, "area_shift")) spec.area_uptake_shift = ToArray<4>("area_shift", *v);
  if (auto v = Find(s, "base_uptake")) spec.base_uptake = ToDouble("base_uptake", *v);
  if (auto v = Find(s, "uptake_noise")) spec.uptake_noise = ToDouble("uptake_noise", *v);
  if (auto v = Find(s, "persistence")) spec.persistence = ToDouble("persistence", *v);
  if (auto v = Find(s, "missing_rate")) spec.missing_rate = ToDouble("missing_rate", *v);
  if (auto v = Find(s, "seed")) spec.seed = ToInt<std::uint64_t>("seed", *v);
  spec.Validate();
  return spec;
}

PanelSchema PanelSchemaFrom(const Settings& s) {
  PanelSchema schema = PanelSchema::Default();
  for (std::string_view field : kColumnFields) {
    const std::string key = "column_" + std::string(field);
    if (auto v = Find(s, key.c_str())) schema.columns[std::string(field)] = *v;
  }
  if (auto v = Find(s, "delimiter")) {
    if (*v == "tab" || *v == "\\t") {
      schema.delimiter = '\t';
    } else if (v->size() == 1) {
      schema.delimiter = (*v)[0];
    } else {
      Invalid("delimiter", "expected a single character or 'tab'");
    }
  }
  if (auto v = Find(s, "poverty_rate_percent")) {
    schema.poverty_rate_percent = ToBool("poverty_rate_percent", *v);
  }
  return schema;
}

}  // namespace snapgap
