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

#include "snapgap/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <ostream>
#include <unordered_map>

#include "snapgap/csv.h"
#include "snapgap/error.h"

namespace snapgap {
namespace {

constexpr std::array<std::pair<RecordFlag, std::string_view>, 4> kFlagNames = {{
    {RecordFlag::kSentinelRecoded, "SentinelRecoded"},
    {RecordFlag::kClipped, "Clipped"},
    {RecordFlag::kDuplicateAveraged, "DuplicateAveraged"},
    {RecordFlag::kSnapExceedsPoverty, "SnapExceedsPoverty"},
}};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsSentinelToken(std::string_view token) {
  const std::string t = Lower(token);
  return t == "na" || t == "n/a";
}

// Outcome of reading one numeric cell.
struct Cell {
  std::optional<double> value;
  bool sentinel = false;
  bool invalid = false;
};

Cell ReadNumeric(std::string_view raw) {
  const std::string_view token = csv::Trim(raw);
  Cell cell;
  if (token.empty()) return cell;
  if (IsSentinelToken(token)) {
    cell.sentinel = true;
    return cell;
  }
  const auto v = csv::ParseDouble(token);
  if (!v) {
    cell.invalid = true;
  } else if (*v < 0.0) {
    cell.sentinel = true;
  } else {
    cell.value = *v;
  }
  return cell;
}

void RecomputeSnapFlag(ZipRecord& r) {
  if (r.pov_fam && r.snap_fam && *r.snap_fam > *r.pov_fam) {
    r.flags.Set(RecordFlag::kSnapExceedsPoverty);
  } else {
    r.flags.Clear(RecordFlag::kSnapExceedsPoverty);
  }
}

constexpr std::array<std::string_view, 8> kRequiredFields = {
    "zip",           "year",           "pov_fam",         "snap_fam",
    "pct_no_vehicle", "pct_no_internet", "pct_no_computer", "pct_hs_only"};
constexpr std::array<std::string_view, 4> kOptionalFields = {
    "fam_universe", "poverty_rate", "area", "flags"};

}  // namespace

std::string_view AreaName(Area area) {
  switch (area) {
    case Area::kUrban: return "Urban";
    case Area::kRural: return "Rural";
    case Area::kMixed: return "Mixed";
    case Area::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<Area> ParseArea(std::string_view token) {
  const std::string t = Lower(csv::Trim(token));
  if (t == "urban") return Area::kUrban;
  if (t == "rural") return Area::kRural;
  if (t == "mixed") return Area::kMixed;
  if (t == "unknown" || t.empty()) return Area::kUnknown;
  return std::nullopt;
}

std::string FlagSet::ToString() const {
  std::string out;
  for (const auto& [flag, name] : kFlagNames) {
    if (!Has(flag)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

std::optional<FlagSet> FlagSet::Parse(std::string_view text) {
  FlagSet flags;
  text = csv::Trim(text);
  while (!text.empty()) {
    const auto bar = text.find('|');
    const std::string_view part = csv::Trim(text.substr(0, bar));
    const auto it = std::find_if(kFlagNames.begin(), kFlagNames.end(),
                                 [&](const auto& p) { return p.second == part; });
    if (it == kFlagNames.end()) return std::nullopt;
    flags.Set(it->first);
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return flags;
}

PanelSchema PanelSchema::Default() {
  PanelSchema schema;
  for (std::string_view f : kRequiredFields) {
    schema.columns.emplace(std::string(f), std::string(f));
  }
  return schema;
}

std::string NormalizeZip(std::string_view raw) {
  std::string_view token = csv::Trim(raw);
  if (const auto dash = token.find('-'); dash != std::string_view::npos) {
    token = token.substr(0, dash);
  }
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorKind::kNonNumericZip, "'" + std::string(raw) + "'");
  }
  if (token.size() > 5) {
    throw Error(ErrorKind::kLengthOverflow, "'" + std::string(raw) + "'");
  }
  return std::string(5 - token.size(), '0') + std::string(token);
}

ParsedPanel ParsePanel(std::istream& in, const PanelSchema& schema) {
  const csv::Table table = csv::Read(in, schema.delimiter);

  std::unordered_map<std::string, std::size_t> header_index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    header_index.emplace(table.header[i], i);
  }
  std::unordered_map<std::string, std::size_t> col;
  auto resolve = [&](std::string_view field, bool required) {
    const auto mapped = schema.columns.find(std::string(field));
    const std::string header =
        mapped != schema.columns.end() ? mapped->second : std::string(field);
    const auto it = header_index.find(header);
    if (it == header_index.end()) {
      if (required || mapped != schema.columns.end()) {
        throw Error(ErrorKind::kMissingColumn,
                    std::string(field) + " (header '" + header + "')");
      }
      return;
    }
    col.emplace(std::string(field), it->second);
  };
  for (std::string_view f : kRequiredFields) resolve(f, true);
  for (std::string_view f : kOptionalFields) resolve(f, false);

  ParsedPanel out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_number = r + 1;
    auto reject = [&](std::string reason) {
      out.rejects.push_back({row_number, std::move(reason)});
    };
    if (row.size() != table.header.size()) {
      reject("expected " + std::to_string(table.header.size()) + " fields, got " +
             std::to_string(row.size()));
      continue;
    }
    auto cell = [&](std::string_view field) -> const std::string* {
      const auto it = col.find(std::string(field));
      return it == col.end() ? nullptr : &row[it->second];
    };

    ZipRecord rec;
    try {
      rec.zip = NormalizeZip(*cell("zip"));
    } catch (const Error& e) {
      reject(e.what());
      continue;
    }

    const std::string_view year_token = csv::Trim(*cell("year"));
    int year = 0;
    const auto [yp, yec] =
        std::from_chars(year_token.data(), year_token.data() + year_token.size(), year);
    if (yec != std::errc() || yp != year_token.data() + year_token.size()) {
      reject("non-integer year '" + std::string(year_token) + "'");
      continue;
    }
    if (year < kFirstValidYear || year > kLastValidYear) {
      reject("year " + std::to_string(year) + " outside 2014-2023");
      continue;
    }
    rec.year = year;

    bool bad = false;
    auto numeric = [&](std::string_view field) -> std::optional<double> {
      const std::string* raw = cell(field);
      if (!raw) return std::nullopt;
      const Cell c = ReadNumeric(*raw);
      if (c.invalid) {
        reject("non-numeric " + std::string(field) + " '" + *raw + "'");
        bad = true;
      }
      if (c.sentinel) rec.flags.Set(RecordFlag::kSentinelRecoded);
      return c.value;
    };

    rec.pov_fam = numeric("pov_fam");
    if (!bad) rec.snap_fam = numeric("snap_fam");
    if (!bad) rec.fam_universe = numeric("fam_universe");
    if (!bad) rec.poverty_rate = numeric("poverty_rate");
    for (std::size_t j = 0; j < kNumPredictors && !bad; ++j) {
      rec.predictors[j] = numeric(kPredictorNames[j]);
      if (rec.predictors[j] && *rec.predictors[j] > 100.0) {
        rec.predictors[j] = 100.0;
        rec.flags.Set(RecordFlag::kClipped);
      }
    }
    if (bad) continue;

    if (rec.poverty_rate) {
      if (schema.poverty_rate_percent) *rec.poverty_rate /= 100.0;
      if (*rec.poverty_rate > 1.0) {
        reject("poverty_rate above 1");
        continue;
      }
    }
    if (const std::string* a = cell("area")) {
      const auto area = ParseArea(*a);
      if (!area) {
        reject("unknown area '" + *a + "'");
        continue;
      }
      rec.area = *area;
    }
    if (const std::string* f = cell("flags")) {
      const auto flags = FlagSet::Parse(*f);
      if (!flags) {
        reject("unknown flags '" + *f + "'");
        continue;
      }
      rec.flags.Merge(*flags);
    }
    RecomputeSnapFlag(rec);
    out.records.push_back(std::move(rec));
  }
  return out;
}

void WritePanel(std::ostream& out, std::span<const ZipRecord> records) {
  std::vector<std::string> header = {"zip", "year", "pov_fam", "snap_fam",
                                     "fam_universe", "poverty_rate"};
  for (auto name : kPredictorNames) header.emplace_back(name);
  header.emplace_back("area");
  header.emplace_back("flags");
  csv::WriteRow(out, header);
  for (const ZipRecord& r : records) {
    std::vector<std::string> row = {r.zip,
                                    std::to_string(r.year),
                                    csv::FormatOptional(r.pov_fam),
                                    csv::FormatOptional(r.snap_fam),
                                    csv::FormatOptional(r.fam_universe),
                                    csv::FormatOptional(r.poverty_rate)};
    for (const auto& p : r.predictors) row.push_back(csv::FormatOptional(p));
    row.emplace_back(AreaName(r.area));
    row.push_back(r.flags.ToString());
    csv::WriteRow(out, row);
  }
}

void WriteRejects(std::ostream& out, std::span<const RowReject> rejects) {
  csv::WriteRow(out, {"row", "reason"});
  for (const auto& r : rejects) {
    csv::WriteRow(out, {std::to_string(r.row), r.reason});
  }
}

std::vector<ZipRecord> Dedupe(std::span<const ZipRecord> records) {
  std::map<std::pair<std::string, int>, std::size_t> group_of;
  std::vector<std::vector<const ZipRecord*>> groups;
  for (const ZipRecord& r : records) {
    const auto [it, inserted] =
        group_of.try_emplace({r.zip, r.year}, groups.size());
    if (inserted) groups.emplace_back();
    auto& members = groups[it->second];
    const bool exact = std::any_of(members.begin(), members.end(),
                                   [&](const ZipRecord* m) { return *m == r; });
    if (!exact) members.push_back(&r);
  }

  std::vector<ZipRecord> out;
  out.reserve(groups.size());
  for (const auto& members : groups) {
    if (members.size() == 1) {
      out.push_back(*members.front());
      continue;
    }
    ZipRecord merged = *members.front();
    auto average = [&](auto field) -> std::optional<double> {
      double sum = 0.0;
      int count = 0;
      for (const ZipRecord* m : members) {
        if (const auto& v = field(*m)) {
          sum += *v;
          ++count;
        }
      }
      if (count == 0) return std::nullopt;
      return sum / count;
    };
    merged.pov_fam = average([](const ZipRecord& r) { return r.pov_fam; });
    merged.snap_fam = average([](const ZipRecord& r) { return r.snap_fam; });
    merged.fam_universe = average([](const ZipRecord& r) { return r.fam_universe; });
    merged.poverty_rate = average([](const ZipRecord& r) { return r.poverty_rate; });
    for (std::size_t j = 0; j < kNumPredictors; ++j) {
      merged.predictors[j] =
          average([j](const ZipRecord& r) { return r.predictors[j]; });
    }
    for (const ZipRecord* m : members) merged.flags.Merge(m->flags);
    merged.flags.Set(RecordFlag::kDuplicateAveraged);
    RecomputeSnapFlag(merged);
    out.push_back(std::move(merged));
  }
  return out;
}

ParsedCrosswalk ParseCrosswalk(std::istream& in, char delimiter) {
  const csv::Table table = csv::Read(in, delimiter);
  std::array<std::size_t, 3> idx{};
  constexpr std::array<std::string_view, 3> kNames = {"zip", "tract_status",
                                                      "res_ratio"};
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    const auto it = std::find_if(table.header.begin(), table.header.end(),
                                 [&](const std::string& h) { return Lower(h) == kNames[k]; });
    if (it == table.header.end()) {
      throw Error(ErrorKind::kMissingColumn, std::string(kNames[k]));
    }
    idx[k] = static_cast<std::size_t>(it - table.header.begin());
  }

  ParsedCrosswalk out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      out.rejects.push_back({r + 1, "field count mismatch"});
      continue;
    }
    CrosswalkRow cw;
    try {
      cw.zip = NormalizeZip(row[idx[0]]);
    } catch (const Error& e) {
      out.rejects.push_back({r + 1, e.what()});
      continue;
    }
    const std::string status = Lower(csv::Trim(row[idx[1]]));
    cw.tract_status = status == "urban"   ? Area::kUrban
                      : status == "rural" ? Area::kRural
                                          : Area::kUnknown;
    const auto ratio = csv::ParseDouble(row[idx[2]]);
    if (!ratio || *ratio < 0.0 || *ratio > 1.0) {
      out.rejects.push_back({r + 1, "res_ratio outside [0,1]"});
      continue;
    }
    cw.res_ratio = *ratio;
    out.rows.push_back(std::move(cw));
  }
  return out;
}

namespace {

// Sums are taken over sorted ratios so the result is independent of row order.
Area DesignateFromRatios(std::vector<double>& urban, std::vector<double>& rural) {
  std::sort(urban.begin(), urban.end());
  std::sort(rural.begin(), rural.end());
  double u = 0.0, r = 0.0;
  for (double v : urban) u += v;
  for (double v : rural) r += v;
  if (u + r <= 0.0) return Area::kUnknown;
  const double share = u / (u + r);
  if (share >= kUrbanShareCutoff) return Area::kUrban;
  if (share <= kRuralShareCutoff) return Area::kRural;
  return Area::kMixed;
}

}  // namespace

Area DesignateArea(std::string_view zip, std::span<const CrosswalkRow> rows) {
  std::vector<double> urban, rural;
  for (const auto& row : rows) {
    if (row.zip != zip) continue;
    if (row.tract_status == Area::kUrban) urban.push_back(row.res_ratio);
    if (row.tract_status == Area::kRural) rural.push_back(row.res_ratio);
  }
  return DesignateFromRatios(urban, rural);
}

std::map<std::string, Area> DesignateAreas(std::span<const CrosswalkRow> rows) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> mass;
  for (const auto& row : rows) {
    auto& [urban, rural] = mass[row.zip];
    if (row.tract_status == Area::kUrban) urban.push_back(row.res_ratio);
    if (row.tract_status == Area::kRural) rural.push_back(row.res_ratio);
  }
  std::map<std::string, Area> out;
  for (auto& [zip, m] : mass) out.emplace(zip, DesignateFromRatios(m.first, m.second));
  return out;
}

void ApplyAreas(std::vector<ZipRecord>& records,
                const std::map<std::string, Area>& areas) {
  for (ZipRecord& r : records) {
    const auto it = areas.find(r.zip);
    r.area = it == areas.end() ? Area::kUnknown : it->second;
  }
}

}  // namespace snapgap
