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

#ifndef SNAPGAP_REPORT_H_
#define SNAPGAP_REPORT_H_

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snapgap {

enum class ReportFormat { kJson, kCsv, kMarkdown };

std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// A rendered table. Cells are already formatted; percentages are x100 with
// one decimal.
struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  // Per column: render as a JSON number (cells "NA" become null).
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> rows;
};

std::string FormatPercent(double fraction);

// Tables built from a manifest document. The metric table has one row per
// (model, cohort) with AUC, AP, Precision, Recall, F1, Accuracy, Pre@1% and
// Pre@5% in that order.
ReportTable MetricsTable(const nlohmann::json& manifest);
ReportTable ThresholdTable(const nlohmann::json& manifest);
ReportTable ImportanceTable(const nlohmann::json& manifest);
ReportTable AreaDistributionTable(const nlohmann::json& manifest);
ReportTable YearlyTable(const nlohmann::json& manifest);
ReportTable FailureTable(const nlohmann::json& manifest);
// Per-model reliability bins, flagged lists and hidden-fragility rows.
ReportTable ReliabilityTable(const nlohmann::json& manifest);
ReportTable FlaggedTable(const nlohmann::json& manifest);
ReportTable HiddenFragilityTable(const nlohmann::json& manifest);

std::string RenderCsv(const ReportTable& table);
// Pipe table; Pre@K cells below 0.05% render as "--".
std::string RenderMarkdown(const ReportTable& table);
// Array of row objects keyed by column name.
nlohmann::json RenderJson(const ReportTable& table);

// Writes the summary tables in `format` plus reliability.csv, flagged.csv and
// hidden_fragility.csv. Returns the written paths. Throws kIoFailure.
std::vector<std::filesystem::path> EmitReport(const nlohmann::json& manifest,
                                              ReportFormat format,
                                              const std::filesystem::path& dir);

}  // namespace snapgap

#endif  // SNAPGAP_REPORT_H_
