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

#ifndef SNAPGAP_CSV_H_
#define SNAPGAP_CSV_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snapgap::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// newlines. A leading UTF-8 byte-order mark is skipped. Throws
// kUnreadableStream if the stream is bad and kEmptyInput without a header.
Table Read(std::istream& in, char delimiter = ',');

void WriteRow(std::ostream& out, const std::vector<std::string>& fields,
              char delimiter = ',');

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);
std::string FormatOptional(const std::optional<double>& value);

// Fixed-point rendering with `decimals` digits after the point.
std::string FormatFixed(double value, int decimals);

std::optional<double> ParseDouble(std::string_view token);
std::string_view Trim(std::string_view s);

}  // namespace snapgap::csv

#endif  // SNAPGAP_CSV_H_
