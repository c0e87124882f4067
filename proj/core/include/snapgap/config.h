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

#ifndef SNAPGAP_CONFIG_H_
#define SNAPGAP_CONFIG_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "snapgap/ingest.h"
#include "snapgap/pipeline.h"
#include "snapgap/synthetic.h"

namespace snapgap {

// Flat key -> value settings. Files hold one `key = value` per line; '#'
// starts a comment. Dashes in keys are read as underscores.
using Settings = std::map<std::string, std::string>;

// Throws kParseError naming the offending line, including duplicate keys.
Settings ParseSettings(std::istream& in);
// Throws kIoFailure when the file cannot be opened.
Settings LoadSettings(const std::filesystem::path& path);

// Every recognized key, sorted. Column overrides are spelled
// column_<field>, e.g. column_pov_fam = POV_FAM_COUNT.
const std::vector<std::string>& KnownKeys();
bool IsKnownKey(std::string_view key);
// Throws kInvalidConfig listing the first unknown key.
void CheckKnownKeys(const Settings& settings);

// Keys not present keep their defaults. Malformed values throw
// kInvalidConfig naming the key.
BacktestConfig BacktestConfigFrom(const Settings& settings);
SyntheticSpec SyntheticSpecFrom(const Settings& settings);
PanelSchema PanelSchemaFrom(const Settings& settings);

// "2014-2018" or "2016".
YearRange ParseYearRange(std::string_view text);
// "all", "singletons", "full", or ';'-separated lists of '+'-joined
// predictor names.
std::vector<FeatureSubset> ParseFeatureSubsets(std::string_view text);
// Comma-separated points. Logistic: C values. Forest: trees:depth:min_leaf.
// Boosting: trees:depth:learning_rate. Depth 0 means unlimited.
std::vector<Hyperparameters> ParseGrid(ModelFamily family, std::string_view text);

}  // namespace snapgap

#endif  // SNAPGAP_CONFIG_H_
