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

#ifndef SNAPGAP_INGEST_H_
#define SNAPGAP_INGEST_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace snapgap {

enum class Area { kUrban, kRural, kMixed, kUnknown };

std::string_view AreaName(Area area);
std::optional<Area> ParseArea(std::string_view token);

enum class RecordFlag : std::uint8_t {
  kSentinelRecoded = 1 << 0,
  kClipped = 1 << 1,
  kDuplicateAveraged = 1 << 2,
  kSnapExceedsPoverty = 1 << 3,
};

class FlagSet {
 public:
  FlagSet() = default;

  bool Has(RecordFlag f) const { return bits_ & static_cast<std::uint8_t>(f); }
  void Set(RecordFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  void Clear(RecordFlag f) { bits_ &= ~static_cast<std::uint8_t>(f); }
  void Merge(FlagSet other) { bits_ |= other.bits_; }
  bool Empty() const { return bits_ == 0; }

  // Pipe-separated names in declaration order, e.g. "SentinelRecoded|Clipped".
  std::string ToString() const;
  static std::optional<FlagSet> Parse(std::string_view text);

  bool operator==(const FlagSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

inline constexpr std::size_t kNumPredictors = 4;

// Column order of the four socioeconomic predictors everywhere in the engine.
inline constexpr std::array<std::string_view, kNumPredictors> kPredictorNames =
    {"pct_no_vehicle", "pct_no_internet", "pct_no_computer", "pct_hs_only"};

// One ZIP-year observation. Counts are doubles because averaging duplicate
// rows can produce fractional values.
struct ZipRecord {
  std::string zip;
  int year = 0;
  std::optional<double> pov_fam;
  std::optional<double> snap_fam;
  // Families in the poverty universe; pov_fam / fam_universe is the rate.
  std::optional<double> fam_universe;
  // Precomputed family poverty rate as a fraction, when supplied.
  std::optional<double> poverty_rate;
  std::array<std::optional<double>, kNumPredictors> predictors;
  Area area = Area::kUnknown;
  FlagSet flags;

  bool operator==(const ZipRecord&) const = default;
};

inline constexpr int kFirstValidYear = 2014;
inline constexpr int kLastValidYear = 2023;

// Maps logical field names to the headers of a particular export. Required
// logical names: zip, year, pov_fam, snap_fam and the four predictor names.
// Optional: fam_universe, poverty_rate, area, flags. Optional fields that are
// not mapped are still picked up when a header carries the logical name.
struct PanelSchema {
  std::map<std::string, std::string> columns;
  char delimiter = ',';
  // Interpret the poverty_rate column as a percentage (0-100).
  bool poverty_rate_percent = false;

  static PanelSchema Default();
};

struct RowReject {
  std::size_t row = 0;  // 1-based data row, header excluded
  std::string reason;

  bool operator==(const RowReject&) const = default;
};

struct ParsedPanel {
  std::vector<ZipRecord> records;
  std::vector<RowReject> rejects;
};

// Throws kMissingColumn, kUnreadableStream or kEmptyInput. Row-level problems
// become rejects; no row is dropped silently.
ParsedPanel ParsePanel(std::istream& in, const PanelSchema& schema);

// Canonical panel CSV; ParsePanel with PanelSchema::Default() reads it back
// into identical records.
void WritePanel(std::ostream& out, std::span<const ZipRecord> records);
void WriteRejects(std::ostream& out, std::span<const RowReject> rejects);

// Left-pads to five digits and strips a "-NNNN" (+4) suffix. Throws
// kNonNumericZip or kLengthOverflow.
std::string NormalizeZip(std::string_view raw);

// One record per (zip, year). Exact duplicates collapse silently; conflicting
// duplicates get the missing-aware mean of every numeric field and the
// DuplicateAveraged flag. Order follows first appearance.
std::vector<ZipRecord> Dedupe(std::span<const ZipRecord> records);

struct CrosswalkRow {
  std::string zip;
  Area tract_status = Area::kUnknown;  // kUrban, kRural or kUnknown
  double res_ratio = 0.0;

  bool operator==(const CrosswalkRow&) const = default;
};

struct ParsedCrosswalk {
  std::vector<CrosswalkRow> rows;
  std::vector<RowReject> rejects;
};

// Columns zip, tract_status, res_ratio (header match is case-insensitive).
ParsedCrosswalk ParseCrosswalk(std::istream& in, char delimiter = ',');

inline constexpr double kUrbanShareCutoff = 0.80;
inline constexpr double kRuralShareCutoff = 0.20;

// Residential mass is summed by tract status; u = urban / (urban + rural).
// Urban if u >= 0.80, Rural if u <= 0.20, Mixed otherwise, Unknown when the
// zip has no urban or rural mass. Rows for other zips are ignored.
Area DesignateArea(std::string_view zip, std::span<const CrosswalkRow> rows);

// Designation for every zip in the crosswalk.
std::map<std::string, Area> DesignateAreas(std::span<const CrosswalkRow> rows);

// Applies the fixed designation to every year of each zip; zips absent from
// the map become Unknown.
void ApplyAreas(std::vector<ZipRecord>& records,
                const std::map<std::string, Area>& areas);

}  // namespace snapgap

#endif  // SNAPGAP_INGEST_H_
