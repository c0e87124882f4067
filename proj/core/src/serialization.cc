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

#include "snapgap/serialization.h"

#include "snapgap/csv.h"
#include "snapgap/error.h"

namespace snapgap {

using nlohmann::json;

namespace {

std::string_view WeightingName(ClassWeighting w) {
  return w == ClassWeighting::kBalanced ? "balanced" : "none";
}

ClassWeighting ParseWeighting(const std::string& s) {
  if (s == "balanced") return ClassWeighting::kBalanced;
  if (s == "none") return ClassWeighting::kNone;
  throw Error(ErrorKind::kParseError, "unknown class weighting '" + s + "'");
}

ThresholdPolicy ParsePolicy(const std::string& s) {
  for (auto p : {ThresholdPolicy::kPrevalenceAnchored, ThresholdPolicy::kYouden,
                 ThresholdPolicy::kFixed}) {
    if (PolicyName(p) == s) return p;
  }
  throw Error(ErrorKind::kParseError, "unknown threshold policy '" + s + "'");
}

template <typename T>
std::optional<T> OptionalField(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const Standardization& s) {
  j = json{{"means", s.means}, {"sds", s.sds}, {"constant_features", s.constant_features}};
}

void from_json(const json& j, Standardization& s) {
  j.at("means").get_to(s.means);
  j.at("sds").get_to(s.sds);
  j.at("constant_features").get_to(s.constant_features);
}

void to_json(json& j, const Hyperparameters& h) {
  j = json{{"c", h.c},
           {"n_trees", h.n_trees},
           {"max_depth", h.max_depth},
           {"min_leaf", h.min_leaf},
           {"learning_rate", h.learning_rate}};
}

void from_json(const json& j, Hyperparameters& h) {
  j.at("c").get_to(h.c);
  j.at("n_trees").get_to(h.n_trees);
  j.at("max_depth").get_to(h.max_depth);
  j.at("min_leaf").get_to(h.min_leaf);
  j.at("learning_rate").get_to(h.learning_rate);
}

void to_json(json& j, const LogisticModel& m) {
  j = json{{"family", FamilyName(ModelFamily::kLogistic)},
           {"features", m.feature_names},
           {"standardization", m.standardization.empty() ? json(nullptr)
                                                         : json(m.standardization)},
           {"coefficients", m.coefficients},
           {"intercept", m.intercept},
           {"c", m.params.c},
           {"weighting", WeightingName(m.params.weighting)},
           {"iterations", m.iterations},
           {"gradient_norm", m.gradient_norm}};
}

void from_json(const json& j, LogisticModel& m) {
  j.at("features").get_to(m.feature_names);
  m.standardization = {};
  if (!j.at("standardization").is_null()) j.at("standardization").get_to(m.standardization);
  m.params.standardize = !m.standardization.empty();
  j.at("coefficients").get_to(m.coefficients);
  j.at("intercept").get_to(m.intercept);
  j.at("c").get_to(m.params.c);
  m.params.weighting = ParseWeighting(j.at("weighting").get<std::string>());
  j.at("iterations").get_to(m.iterations);
  j.at("gradient_norm").get_to(m.gradient_norm);
}

void to_json(json& j, const TreeEnsembleModel& m) {
  json trees = json::array();
  for (const DecisionTree& t : m.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(),
         right = json::array(), value = json::array();
    for (const TreeNode& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back(json{{"feature", feature},
                         {"threshold", threshold},
                         {"left", left},
                         {"right", right},
                         {"value", value}});
  }
  const ModelFamily family = m.kind == EnsembleKind::kRandomForest
                                 ? ModelFamily::kRandomForest
                                 : ModelFamily::kGradientBoosting;
  j = json{{"family", FamilyName(family)},
           {"features", m.feature_names},
           {"params",
            {{"n_trees", m.params.n_trees},
             {"max_depth", m.params.max_depth},
             {"min_leaf", m.params.min_leaf},
             {"learning_rate", m.params.learning_rate},
             {"max_features", m.params.max_features},
             {"weighting", WeightingName(m.params.weighting)},
             {"leaf_l2", m.params.leaf_l2},
             {"seed", m.params.seed}}},
           {"base_score", m.base_score},
           {"trees", trees}};
}

void from_json(const json& j, TreeEnsembleModel& m) {
  const auto family = ParseFamily(j.at("family").get<std::string>());
  if (!family || *family == ModelFamily::kLogistic) {
    throw Error(ErrorKind::kParseError, "not a tree ensemble");
  }
  m.kind = *family == ModelFamily::kRandomForest ? EnsembleKind::kRandomForest
                                                 : EnsembleKind::kGradientBoosting;
  j.at("features").get_to(m.feature_names);
  const json& p = j.at("params");
  p.at("n_trees").get_to(m.params.n_trees);
  p.at("max_depth").get_to(m.params.max_depth);
  p.at("min_leaf").get_to(m.params.min_leaf);
  p.at("learning_rate").get_to(m.params.learning_rate);
  p.at("max_features").get_to(m.params.max_features);
  m.params.weighting = ParseWeighting(p.at("weighting").get<std::string>());
  p.at("leaf_l2").get_to(m.params.leaf_l2);
  p.at("seed").get_to(m.params.seed);
  j.at("base_score").get_to(m.base_score);
  m.trees.clear();
  for (const json& t : j.at("trees")) {
    DecisionTree tree;
    const auto& feature = t.at("feature");
    tree.nodes.resize(feature.size());
    for (std::size_t i = 0; i < feature.size(); ++i) {
      TreeNode& n = tree.nodes[i];
      feature.at(i).get_to(n.feature);
      t.at("threshold").at(i).get_to(n.threshold);
      t.at("left").at(i).get_to(n.left);
      t.at("right").at(i).get_to(n.right);
      t.at("value").at(i).get_to(n.value);
      if (n.feature >= static_cast<int>(m.feature_names.size()) ||
          (n.feature >= 0 && (n.left < 0 || n.right < 0 ||
                              n.left >= static_cast<int>(feature.size()) ||
                              n.right >= static_cast<int>(feature.size())))) {
        throw Error(ErrorKind::kParseError, "tree node references an invalid index");
      }
    }
    m.trees.push_back(std::move(tree));
  }
}

void to_json(json& j, const FittedModel& m) {
  std::visit([&](const auto& model) { to_json(j, model); }, m);
}

void from_json(const json& j, FittedModel& m) {
  const auto family = ParseFamily(j.at("family").get<std::string>());
  if (!family) throw Error(ErrorKind::kParseError, "unknown model family");
  if (*family == ModelFamily::kLogistic) {
    m = j.get<LogisticModel>();
  } else {
    m = j.get<TreeEnsembleModel>();
  }
}

void to_json(json& j, const IsotonicMap& m) {
  j = json{{"scores", m.scores}, {"values", m.values}, {"fitted_on", m.fitted_on}};
}

void from_json(const json& j, IsotonicMap& m) {
  j.at("scores").get_to(m.scores);
  j.at("values").get_to(m.values);
  j.at("fitted_on").get_to(m.fitted_on);
}

void to_json(json& j, const DecisionRule& r) {
  j = json{{"policy", PolicyName(r.policy)},
           {"threshold", r.threshold},
           {"source_prevalence",
            r.source_prevalence ? json(*r.source_prevalence) : json(nullptr)}};
}

void from_json(const json& j, DecisionRule& r) {
  r.policy = ParsePolicy(j.at("policy").get<std::string>());
  j.at("threshold").get_to(r.threshold);
  r.source_prevalence = OptionalField<double>(j, "source_prevalence");
}

void to_json(json& j, const ReliabilityBin& b) {
  j = json{{"bin_center", b.bin_center},
           {"mean_predicted", b.mean_predicted},
           {"observed_rate", b.observed_rate},
           {"count", b.count}};
}

void from_json(const json& j, ReliabilityBin& b) {
  j.at("bin_center").get_to(b.bin_center);
  j.at("mean_predicted").get_to(b.mean_predicted);
  j.at("observed_rate").get_to(b.observed_rate);
  j.at("count").get_to(b.count);
}

void to_json(json& j, const EvalReport& r) {
  json at = json::object();
  for (const auto& [fraction, value] : r.precision_at) at[csv::FormatDouble(fraction)] = value;
  j = json{{"model", r.model},     {"cohort", r.cohort},       {"n", r.n},
           {"n_pos", r.n_pos},     {"auc", r.auc},             {"ap", r.ap},
           {"precision", r.precision}, {"recall", r.recall},   {"f1", r.f1},
           {"accuracy", r.accuracy}, {"flagged", r.flagged},   {"precision_at", at},
           {"rule", r.rule}};
}

void from_json(const json& j, EvalReport& r) {
  j.at("model").get_to(r.model);
  j.at("cohort").get_to(r.cohort);
  j.at("n").get_to(r.n);
  j.at("n_pos").get_to(r.n_pos);
  j.at("auc").get_to(r.auc);
  j.at("ap").get_to(r.ap);
  j.at("precision").get_to(r.precision);
  j.at("recall").get_to(r.recall);
  j.at("f1").get_to(r.f1);
  j.at("accuracy").get_to(r.accuracy);
  j.at("flagged").get_to(r.flagged);
  r.precision_at.clear();
  for (const auto& [key, value] : j.at("precision_at").items()) {
    const auto fraction = csv::ParseDouble(key);
    if (!fraction) throw Error(ErrorKind::kParseError, "bad precision_at key " + key);
    r.precision_at[*fraction] = value.get<double>();
  }
  j.at("rule").get_to(r.rule);
}

void to_json(json& j, const FeatureImportance& f) {
  j = json{{"name", f.name},
           {"delta_auc", f.delta_auc},
           {"delta_ap", f.delta_ap},
           {"repeats", f.repeats},
           {"dispersion", f.dispersion}};
}

void from_json(const json& j, FeatureImportance& f) {
  j.at("name").get_to(f.name);
  j.at("delta_auc").get_to(f.delta_auc);
  j.at("delta_ap").get_to(f.delta_ap);
  j.at("repeats").get_to(f.repeats);
  j.at("dispersion").get_to(f.dispersion);
}

void to_json(json& j, const ImportanceReport& r) {
  j = json{{"metric", r.metric == ImportanceMetric::kAuc ? "auc" : "ap"},
           {"features", r.features}};
}

void from_json(const json& j, ImportanceReport& r) {
  r.metric = j.at("metric").get<std::string>() == "ap" ? ImportanceMetric::kAp
                                                       : ImportanceMetric::kAuc;
  j.at("features").get_to(r.features);
}

void to_json(json& j, const ThresholdSet& t) {
  j = json{{"area", t.area ? json(std::string(AreaName(*t.area))) : json("All")},
           {"tau_hi", t.tau_hi},
           {"tau_lo", t.tau_lo},
           {"eligible", t.eligible},
           {"positives", t.positives},
           {"prevalence", t.prevalence}};
}

void from_json(const json& j, ThresholdSet& t) {
  const auto area = j.at("area").get<std::string>();
  t.area.reset();
  if (area != "All") {
    const auto parsed = ParseArea(area);
    if (!parsed) throw Error(ErrorKind::kParseError, "unknown area " + area);
    t.area = *parsed;
  }
  j.at("tau_hi").get_to(t.tau_hi);
  j.at("tau_lo").get_to(t.tau_lo);
  j.at("eligible").get_to(t.eligible);
  j.at("positives").get_to(t.positives);
  j.at("prevalence").get_to(t.prevalence);
}

void to_json(json& j, const OlsFit& f) {
  j = json{{"alpha", f.alpha}, {"beta", f.beta}, {"r2", f.r2}};
}

void from_json(const json& j, OlsFit& f) {
  j.at("alpha").get_to(f.alpha);
  j.at("beta").get_to(f.beta);
  j.at("r2").get_to(f.r2);
}

void to_json(json& j, const HiddenFragility& h) {
  j = json{{"zip", h.zip}, {"year", h.year}, {"residual", h.residual}};
}

void from_json(const json& j, HiddenFragility& h) {
  j.at("zip").get_to(h.zip);
  j.at("year").get_to(h.year);
  j.at("residual").get_to(h.residual);
}

json ScorerToJson(const CalibratedScorer& scorer) {
  return json{{"format", kModelFormat},
              {"family", FamilyName(FamilyOf(scorer.model))},
              {"hyperparameters", scorer.hyper},
              {"root_seed", scorer.root_seed},
              {"model", scorer.model},
              {"calibration",
               scorer.calibration ? json(*scorer.calibration) : json(nullptr)},
              {"rule", scorer.rule}};
}

CalibratedScorer ScorerFromJson(const json& j) {
  if (!j.is_object() || !j.contains("format") ||
      j.at("format").get<std::string>() != kModelFormat) {
    throw Error(ErrorKind::kParseError, "missing or unsupported model format tag");
  }
  try {
    CalibratedScorer s;
    s.model = j.at("model").get<FittedModel>();
    j.at("hyperparameters").get_to(s.hyper);
    j.at("root_seed").get_to(s.root_seed);
    s.calibration = OptionalField<IsotonicMap>(j, "calibration");
    j.at("rule").get_to(s.rule);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
}

}  // namespace snapgap
