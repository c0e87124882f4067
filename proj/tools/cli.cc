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

#include "cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "snapgap/config.h"
#include "snapgap/digest.h"
#include "snapgap/error.h"
#include "snapgap/ingest.h"
#include "snapgap/labeling.h"
#include "snapgap/pipeline.h"
#include "snapgap/report.h"
#include "snapgap/serialization.h"
#include "snapgap/synthetic.h"
#include "snapgap/version.h"

namespace snapgap::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Per-subcommand flag storage; every known key is also a --key flag.
struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
};

void AddCommonOptions(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_path, "key = value settings file");
  for (const std::string& key : KnownKeys()) {
    cmd.options[key] = cmd.app->add_option("--" + key, cmd.flags[key]);
  }
}

// Config file first, then command-line flags on top.
Settings Collect(const Command& cmd) {
  Settings settings;
  if (!cmd.config_path.empty()) {
    settings = LoadSettings(cmd.config_path);
    CheckKnownKeys(settings);
  }
  for (const auto& [key, option] : cmd.options) {
    if (option->count() > 0) settings[key] = cmd.flags.at(key);
  }
  return settings;
}

const std::string& Require(const Settings& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end() || it->second.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "missing required setting --" + key);
  }
  return it->second;
}

std::string Get(const Settings& s, const std::string& key, const std::string& fallback) {
  auto it = s.find(key);
  return it == s.end() || it->second.empty() ? fallback : it->second;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ifstream OpenInput(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open " + path.string());
  return in;
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "error writing " + path.string());
}

std::vector<ZipRecord> LoadPanel(const Settings& s) {
  const PanelSchema schema = PanelSchemaFrom(s);
  std::ifstream in = OpenInput(Require(s, "panel"));
  return ParsePanel(in, schema).records;
}

ReportFormat FormatFrom(const Settings& s) {
  const std::string name = Get(s, "format", "markdown");
  const auto format = ParseReportFormat(name);
  if (!format) throw Error(ErrorKind::kInvalidConfig, "unknown format " + name);
  return *format;
}

int Ingest(const Settings& s, std::ostream& out) {
  const PanelSchema schema = PanelSchemaFrom(s);
  const fs::path out_path = Require(s, "out");
  std::vector<ZipRecord> records;
  std::vector<RowReject> rejects;
  const std::vector<std::string> files = SplitList(Require(s, "panel"));
  for (const std::string& file : files) {
    std::ifstream in = OpenInput(file);
    ParsedPanel parsed = ParsePanel(in, schema);
    for (auto& r : parsed.records) records.push_back(std::move(r));
    for (auto& r : parsed.rejects) {
      if (files.size() > 1) r.reason = file + ": " + r.reason;
      rejects.push_back(std::move(r));
    }
  }
  records = Dedupe(records);
  if (auto it = s.find("crosswalk"); it != s.end()) {
    std::ifstream in = OpenInput(it->second);
    const ParsedCrosswalk crosswalk = ParseCrosswalk(in, schema.delimiter);
    ApplyAreas(records, DesignateAreas(crosswalk.rows));
    for (const RowReject& r : crosswalk.rejects) {
      rejects.push_back({r.row, "crosswalk: " + r.reason});
    }
  }
  std::ostringstream panel_text, reject_text;
  WritePanel(panel_text, records);
  WriteRejects(reject_text, rejects);
  WriteText(out_path, panel_text.str());
  const fs::path reject_path =
      Get(s, "rejects", (out_path.parent_path() / (out_path.stem().string() + "_rejects.csv")).string());
  WriteText(reject_path, reject_text.str());

  std::map<Area, std::size_t> by_area;
  for (const ZipRecord& r : records) ++by_area[r.area];
  out << "records " << records.size() << ", rejects " << rejects.size() << "\n";
  for (const auto& [area, count] : by_area) out << "  " << AreaName(area) << " " << count << "\n";
  return 0;
}

int Label(const Settings& s, std::ostream& out) {
  const BacktestConfig config = BacktestConfigFrom(s);
  LabelConfig label = config.label;
  label.stratify_by_area = config.area_mode == AreaMode::kStratified;
  const std::vector<ZipRecord> records = LoadPanel(s);
  LabeledPanel panel = BuildLabels(records, label);
  std::optional<OlsFit> ols;
  std::vector<HiddenFragility> hidden;
  try {
    ols = AttachResiduals(panel);
    hidden = FlagHiddenFragility(panel, config.hidden_tail);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateDesign) throw;
  }
  std::size_t anomalies = 0;
  for (const LabeledRow& row : panel.rows) anomalies += row.s_raw && *row.s_raw > 1.0;

  const fs::path out_path = Require(s, "out");
  std::ostringstream text;
  WriteLabeledPanel(text, panel);
  WriteText(out_path, text.str());
  json sidecar{{"thresholds", panel.thresholds},
               {"eligible", panel.eligible},
               {"positives", panel.positives},
               {"prevalence", panel.prevalence},
               {"anomalies", anomalies},
               {"ols", ols ? json(*ols) : json(nullptr)},
               {"hidden_fragility", hidden}};
  const fs::path sidecar_path = Get(
      s, "thresholds",
      (out_path.parent_path() / (out_path.stem().string() + "_thresholds.json")).string());
  WriteText(sidecar_path, sidecar.dump(2) + "\n");
  out << "eligible " << panel.eligible << ", positives " << panel.positives
      << ", prevalence " << FormatPercent(panel.prevalence) << "%\n";
  return 0;
}

std::string FileStem(const TrainedModel& m) {
  std::string stem = m.cohort + "__" + m.name;
  for (char& c : stem) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) c = '_';
  }
  return stem;
}

int Train(const Settings& s, std::ostream& out, std::ostream& err) {
  const BacktestConfig config = BacktestConfigFrom(s);
  const fs::path dir = Require(s, "model_dir");
  const std::vector<ZipRecord> records = LoadPanel(s);
  const TrainingResult result = TrainModels(config, records);

  json index = json::array();
  for (const TrainedModel& m : result.models) {
    json doc = ScorerToJson(m.scorer);
    json features = json::array();
    for (std::size_t j : m.features) features.push_back(kPredictorNames[j]);
    doc["cohort"] = m.cohort;
    doc["features"] = features;
    doc["train_rows"] = m.train_rows;
    doc["train_positives"] = m.train_positives;
    doc["train_prevalence"] = m.train_prevalence;
    const std::string file = FileStem(m) + ".json";
    WriteText(dir / file, doc.dump(2) + "\n");
    index.push_back(json{{"file", file}, {"cohort", m.cohort}, {"model", m.name}});
  }
  json failures = json::array();
  for (const CohortFailure& f : result.failures) {
    failures.push_back(json{{"cohort", f.cohort}, {"model", f.model}, {"kind", f.kind},
                            {"message", f.message}});
    err << "warning: " << f.cohort << " " << f.model << ": " << f.message << "\n";
  }
  WriteText(dir / "index.json",
            json{{"config", ConfigToJson(config)},
                 {"models", index},
                 {"failures", failures},
                 {"thresholds", result.p1.thresholds},
                 {"prevalence", result.p1.prevalence}}
                    .dump(2) +
                "\n");
  out << "trained " << result.models.size() << " models, " << result.failures.size()
      << " failures\n";
  return result.models.empty() ? 3 : 0;
}

int Backtest(const Settings& s, std::ostream& out, std::ostream& err) {
  const BacktestConfig config = BacktestConfigFrom(s);
  const fs::path dir = Require(s, "out");
  const ReportFormat format = FormatFrom(s);
  const std::string panel_path = Require(s, "panel");
  const std::vector<ZipRecord> records = LoadPanel(s);
  RunManifest manifest = RunBacktest(config, records);
  manifest.input_digests["panel_file"] = Sha256File(panel_path);
  const json doc = ManifestToJson(manifest);
  WriteText(Get(s, "manifest", (dir / "manifest.json").string()), doc.dump(2) + "\n");
  EmitReport(doc, format, dir);
  for (const CohortFailure& f : manifest.failures) {
    err << "warning: " << f.cohort << " " << f.model << ": " << f.message << "\n";
  }
  out << "results " << manifest.results.size() << ", failures " << manifest.failures.size()
      << ", digest " << doc.at("digest").get<std::string>() << "\n";
  return manifest.results.empty() ? 3 : 0;
}

int Synth(const Settings& s, std::ostream& out) {
  const SyntheticSpec spec = SyntheticSpecFrom(s);
  const fs::path out_path = Require(s, "out");
  const SyntheticPanel panel = GenerateSynthetic(spec);
  std::ostringstream text;
  WritePanel(text, panel.records);
  WriteText(out_path, text.str());
  if (auto it = s.find("truth"); it != s.end()) {
    json years = json::array();
    for (const SyntheticYear& y : panel.truth.years) {
      years.push_back(json{{"year", y.year},
                           {"target_prevalence", y.target_prevalence},
                           {"kappa", y.kappa},
                           {"realized_prevalence", y.realized_prevalence},
                           {"eligible", y.eligible},
                           {"anomalies", y.anomalies}});
    }
    json labels = json::array();
    for (std::size_t i = 0; i < panel.records.size(); ++i) {
      labels.push_back(json{{"zip", panel.records[i].zip},
                            {"year", panel.records[i].year},
                            {"label", panel.truth.labels[i]}});
    }
    json coefficients = json::object();
    for (std::size_t j = 0; j < kNumPredictors; ++j) {
      coefficients[std::string(kPredictorNames[j])] = panel.truth.coefficients[j];
    }
    WriteText(it->second, json{{"coefficients", coefficients},
                               {"planted_anomalies", panel.truth.planted_anomalies},
                               {"years", years},
                               {"labels", labels}}
                                  .dump(2) +
                              "\n");
  }
  out << "records " << panel.records.size() << ", planted anomalies "
      << panel.truth.planted_anomalies << "\n";
  return 0;
}

int Report(const Settings& s, std::ostream& out) {
  const ReportFormat format = FormatFrom(s);
  std::ifstream in = OpenInput(Require(s, "manifest"));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kManifestFormat) {
    throw Error(ErrorKind::kParseError, "not a manifest document");
  }
  try {
    const auto paths = EmitReport(doc, format, Require(s, "out"));
    out << "wrote " << paths.size() << " files\n";
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
  return 0;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screening engine for low benefit uptake in high-poverty zip codes", "snapgap"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::map<std::string, std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& name, const std::string& help) {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    AddCommonOptions(*cmd);
    commands[name] = std::move(cmd);
  };
  add("ingest", "raw panel CSVs and crosswalk -> validated panel");
  add("label", "panel -> labeled panel and threshold sidecar");
  add("train", "training-period models -> model files");
  add("backtest", "full out-of-time run -> manifest and reports");
  add("synth", "synthetic panel from generator settings");
  add("report", "manifest -> formatted reports");
  commands["backtest"]->options["seed"]->required();
  commands["synth"]->options["seed"]->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [name, cmd] : commands) {
      if (!cmd->app->parsed()) continue;
      const Settings settings = Collect(*cmd);
      if (name == "ingest") return Ingest(settings, out);
      if (name == "label") return Label(settings, out);
      if (name == "train") return Train(settings, out, err);
      if (name == "backtest") return Backtest(settings, out, err);
      if (name == "synth") return Synth(settings, out);
      if (name == "report") return Report(settings, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace snapgap::cli
