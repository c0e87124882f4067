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

#ifndef SNAPGAP_SERIALIZATION_H_
#define SNAPGAP_SERIALIZATION_H_

#include <nlohmann/json.hpp>
#include <string_view>

#include "snapgap/calibration.h"
#include "snapgap/labeling.h"
#include "snapgap/metrics.h"
#include "snapgap/model.h"
#include "snapgap/scorer.h"

namespace snapgap {

// Format tag written into every model document.
inline constexpr std::string_view kModelFormat = "snapgap.model/1";

// nlohmann::json hooks, found by argument-dependent lookup.
void to_json(nlohmann::json& j, const Standardization& s);
void from_json(const nlohmann::json& j, Standardization& s);
void to_json(nlohmann::json& j, const Hyperparameters& h);
void from_json(const nlohmann::json& j, Hyperparameters& h);
void to_json(nlohmann::json& j, const LogisticModel& m);
void from_json(const nlohmann::json& j, LogisticModel& m);
void to_json(nlohmann::json& j, const TreeEnsembleModel& m);
void from_json(const nlohmann::json& j, TreeEnsembleModel& m);
void to_json(nlohmann::json& j, const FittedModel& m);
void from_json(const nlohmann::json& j, FittedModel& m);
void to_json(nlohmann::json& j, const IsotonicMap& m);
void from_json(const nlohmann::json& j, IsotonicMap& m);
void to_json(nlohmann::json& j, const DecisionRule& r);
void from_json(const nlohmann::json& j, DecisionRule& r);
void to_json(nlohmann::json& j, const ReliabilityBin& b);
void from_json(const nlohmann::json& j, ReliabilityBin& b);
void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);
void to_json(nlohmann::json& j, const FeatureImportance& f);
void from_json(const nlohmann::json& j, FeatureImportance& f);
void to_json(nlohmann::json& j, const ImportanceReport& r);
void from_json(const nlohmann::json& j, ImportanceReport& r);
void to_json(nlohmann::json& j, const ThresholdSet& t);
void from_json(const nlohmann::json& j, ThresholdSet& t);
void to_json(nlohmann::json& j, const OlsFit& f);
void from_json(const nlohmann::json& j, OlsFit& f);
void to_json(nlohmann::json& j, const HiddenFragility& h);
void from_json(const nlohmann::json& j, HiddenFragility& h);

// Versioned model document: family, hyperparameters, standardization,
// coefficients or tree arrays, calibration map, decision rule, root seed.
nlohmann::json ScorerToJson(const CalibratedScorer& scorer);
// Throws kParseError for a missing or foreign format tag.
CalibratedScorer ScorerFromJson(const nlohmann::json& j);

}  // namespace snapgap

#endif  // SNAPGAP_SERIALIZATION_H_
