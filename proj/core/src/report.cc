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

#include "snapgap/report.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "snapgap/csv.h"
#include "snapgap/error.h"

namespace snapgap {

using nlohmann::json;

namespace {

constexpr std::string_view kMissing = "NA";

// Column spec: name and whether it is numeric.
struct Col {
  const char* name;
  bool numeric;
};

ReportTable MakeTable(std::string name, std::initializer_list<Col> cols) {
  ReportTable t;
  t.name = std::move(name);
  for (const Col& c : cols) {
    t.columns.emplace_back(c.name);
    t.numeric.push_back(c.numeric);
  }
  return t;
}

std::string Int(const json& v) { return std::to_string(v.get<long long>()); }

std::string Fixed(const json& v, int decimals) {
  return v.is_null() ? std::string(kMissing) : csv::FormatFixed(v.get<double>(), decimals);
}

std::string Percent(const json& v) {
  return v.is_null() ? std::string(kMissing) : FormatPercent(v.get<double>());
}

std::string Exact(const json& v) {
  return v.is_null() ? std::string(kMissing) : csv::FormatDouble(v.get<double>());
}

std::string PrecisionAt(const json& report, double fraction) {
  const json& at = report.at("precision_at");
  const std::string key = csv::FormatDouble(fraction);
  return at.contains(key) ? Percent(at.at(key)) : std::string(kMissing);
}

const json& Array(const json& manifest, const char* key) {
  static const json empty = json::array();
  return manifest.contains(key) ? manifest.at(key) : empty;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "error writing " + path.string());
}

bool IsPrecisionAtColumn(const std::string& column) { return column.rfind("Pre@", 0) == 0; }

}  // namespace

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  return std::nullopt;
}

std::string FormatPercent(double fraction) { return csv::FormatFixed(fraction * 100.0, 1); }

ReportTable MetricsTable(const json& manifest) {
  ReportTable t = MakeTable(
      "metrics", {{"cohort", false},    {"model", false},     {"n", true},
                  {"n_pos", true},      {"AUC", true},        {"AP", true},
                  {"Precision", true},  {"Recall", true},     {"F1", true},
                  {"Accuracy", true},   {"Pre@1%", true},     {"Pre@5%", true},
                  {"flagged", true},    {"policy", false},    {"threshold", true}});
  for (const json& r : Array(manifest, "results")) {
    const json& rep = r.at("report");
    t.rows.push_back({rep.at("cohort").get<std::string>(), rep.at("model").get<std::string>(),
                      Int(rep.at("n")), Int(rep.at("n_pos")), Percent(rep.at("auc")),
                      Percent(rep.at("ap")), Percent(rep.at("precision")),
                      Percent(rep.at("recall")), Percent(rep.at("f1")),
                      Percent(rep.at("accuracy")), PrecisionAt(rep, 0.01),
                      PrecisionAt(rep, 0.05), Int(rep.at("flagged")),
                      rep.at("rule").at("policy").get<std::string>(),
                      Fixed(rep.at("rule").at("threshold"), 4)});
  }
  return t;
}

ReportTable ThresholdTable(const json& manifest) {
  ReportTable t = MakeTable("thresholds", {{"period", false},
                                           {"area", false},
                                           {"poverty_threshold_pct", true},
                                           {"uptake_threshold", true},
                                           {"eligible", true},
                                           {"positives", true},
                                           {"prevalence_pct", true}});
  for (const json& p : Array(manifest, "periods")) {
    for (const json& th : p.at("thresholds")) {
      t.rows.push_back({p.at("name").get<std::string>(), th.at("area").get<std::string>(),
                        Percent(th.at("tau_hi")), Fixed(th.at("tau_lo"), 3),
                        Int(th.at("eligible")), Int(th.at("positives")),
                        Percent(th.at("prevalence"))});
    }
  }
  return t;
}

ReportTable ImportanceTable(const json& manifest) {
  ReportTable t = MakeTable("importance", {{"cohort", false},
                                           {"model", false},
                                           {"feature", false},
                                           {"delta_auc", true},
                                           {"delta_ap", true},
                                           {"repeats", true},
                                           {"dispersion", true}});
  for (const json& r : Array(manifest, "results")) {
    for (const json& f : r.at("importance").at("features")) {
      t.rows.push_back({r.at("cohort").get<std::string>(), r.at("name").get<std::string>(),
                        f.at("name").get<std::string>(), Fixed(f.at("delta_auc"), 4),
                        Fixed(f.at("delta_ap"), 4), Int(f.at("repeats")),
                        Fixed(f.at("dispersion"), 4)});
    }
  }
  return t;
}

ReportTable AreaDistributionTable(const json& manifest) {
  ReportTable t = MakeTable("area_distribution", {{"area", false},
                                                  {"eligible", true},
                                                  {"eligible_pct", true},
                                                  {"bottom10", true},
                                                  {"bottom10_pct", true},
                                                  {"bottom30", true},
                                                  {"bottom30_pct", true}});
  for (const json& a : Array(manifest, "area_distribution")) {
    t.rows.push_back({a.at("area").get<std::string>(), Int(a.at("eligible")),
                      Percent(a.at("eligible_share")), Int(a.at("bottom10")),
                      Percent(a.at("bottom10_share")), Int(a.at("bottom30")),
                      Percent(a.at("bottom30_share"))});
  }
  return t;
}

ReportTable YearlyTable(const json& manifest) {
  ReportTable t = MakeTable("yearly", {{"year", true},
                                       {"rows", true},
                                       {"eligible", true},
                                       {"poverty_threshold_pct", true},
                                       {"uptake_threshold", true},
                                       {"prevalence_pct", true},
                                       {"anomalies", true}});
  for (const json& y : Array(manifest, "yearly")) {
    t.rows.push_back({Int(y.at("year")), Int(y.at("rows")), Int(y.at("eligible")),
                      Percent(y.at("tau_hi")), Fixed(y.at("tau_lo"), 3),
                      Percent(y.at("prevalence")), Int(y.at("anomalies"))});
  }
  return t;
}

ReportTable FailureTable(const json& manifest) {
  ReportTable t = MakeTable("failures", {{"cohort", false},
                                         {"model", false},
                                         {"kind", false},
                                         {"message", false}});
  for (const json& f : Array(manifest, "failures")) {
    t.rows.push_back({f.at("cohort").get<std::string>(), f.at("model").get<std::string>(),
                      f.at("kind").get<std::string>(), f.at("message").get<std::string>()});
  }
  return t;
}

ReportTable ReliabilityTable(const json& manifest) {
  ReportTable t = MakeTable("reliability", {{"cohort", false},
                                            {"model", false},
                                            {"bin_center", true},
                                            {"mean_predicted", true},
                                            {"observed_rate", true},
                                            {"count", true}});
  for (const json& r : Array(manifest, "results")) {
    for (const json& b : r.at("reliability")) {
      t.rows.push_back({r.at("cohort").get<std::string>(), r.at("name").get<std::string>(),
                        Exact(b.at("bin_center")), Exact(b.at("mean_predicted")),
                        Exact(b.at("observed_rate")), Int(b.at("count"))});
    }
  }
  return t;
}

ReportTable FlaggedTable(const json& manifest) {
  ReportTable t = MakeTable("flagged", {{"cohort", false},
                                        {"model", false},
                                        {"rank", true},
                                        {"zip", false},
                                        {"year", true},
                                        {"probability", true},
                                        {"label", true}});
  for (const json& r : Array(manifest, "results")) {
    long long rank = 0;
    for (const json& f : r.at("flagged")) {
      t.rows.push_back({r.at("cohort").get<std::string>(), r.at("name").get<std::string>(),
                        std::to_string(++rank), f.at("zip").get<std::string>(),
                        Int(f.at("year")), Exact(f.at("probability")), Int(f.at("label"))});
    }
  }
  return t;
}

ReportTable HiddenFragilityTable(const json& manifest) {
  ReportTable t = MakeTable("hidden_fragility", {{"period", false},
                                                 {"zip", false},
                                                 {"year", true},
                                                 {"residual", true}});
  for (const json& p : Array(manifest, "periods")) {
    for (const json& h : p.at("hidden_fragility")) {
      t.rows.push_back({p.at("name").get<std::string>(), h.at("zip").get<std::string>(),
                        Int(h.at("year")), Exact(h.at("residual"))});
    }
  }
  return t;
}

std::string RenderCsv(const ReportTable& table) {
  std::ostringstream out;
  csv::WriteRow(out, table.columns);
  for (const auto& row : table.rows) csv::WriteRow(out, row);
  return out.str();
}

std::string RenderMarkdown(const ReportTable& table) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (const auto& c : cells) {
      std::string cell = c;
      for (std::size_t pos = 0; (pos = cell.find('|', pos)) != std::string::npos; pos += 2) {
        cell.replace(pos, 1, "\\|");
      }
      out << ' ' << cell << " |";
    }
    out << '\n';
  };
  line(table.columns);
  out << '|';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (table.numeric[i] ? " ---: |" : " --- |");
  }
  out << '\n';
  for (const auto& row : table.rows) {
    std::vector<std::string> cells = row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      // One-decimal percentages of zero mean a value below 0.05%.
      if (IsPrecisionAtColumn(table.columns[i]) && cells[i] == "0.0") cells[i] = "--";
    }
    line(cells);
  }
  return out.str();
}

json RenderJson(const ReportTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const std::string& cell = row[i];
      if (!table.numeric[i]) {
        obj[table.columns[i]] = cell;
      } else if (cell == kMissing) {
        obj[table.columns[i]] = nullptr;
      } else if (cell.find_first_of(".eE") == std::string::npos) {
        long long v = 0;
        std::from_chars(cell.data(), cell.data() + cell.size(), v);
        obj[table.columns[i]] = v;
      } else {
        obj[table.columns[i]] = csv::ParseDouble(cell).value_or(0.0);
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

std::vector<std::filesystem::path> EmitReport(const json& manifest, ReportFormat format,
                                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoFailure, "cannot create " + dir.string());

  const std::vector<ReportTable> summary = {
      MetricsTable(manifest),          ThresholdTable(manifest), ImportanceTable(manifest),
      AreaDistributionTable(manifest), YearlyTable(manifest),    FailureTable(manifest)};
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    WriteFile(path, text);
    written.push_back(path);
  };

  switch (format) {
    case ReportFormat::kJson: {
      json doc = json::object();
      for (const auto& t : summary) doc[t.name] = RenderJson(t);
      write(dir / "report.json", doc.dump(2) + "\n");
      break;
    }
    case ReportFormat::kCsv:
      for (const auto& t : summary) write(dir / (t.name + ".csv"), RenderCsv(t));
      break;
    case ReportFormat::kMarkdown: {
      std::ostringstream md;
      md << "# Backtest report\n";
      if (manifest.contains("digest")) {
        md << "\nManifest digest `" << manifest.at("digest").get<std::string>() << "`\n";
      }
      for (const auto& t : summary) md << "\n## " << t.name << "\n\n" << RenderMarkdown(t);
      write(dir / "report.md", md.str());
      break;
    }
  }
  write(dir / "reliability.csv", RenderCsv(ReliabilityTable(manifest)));
  write(dir / "flagged.csv", RenderCsv(FlaggedTable(manifest)));
  write(dir / "hidden_fragility.csv", RenderCsv(HiddenFragilityTable(manifest)));
  return written;
}

}  // namespace snapgap
