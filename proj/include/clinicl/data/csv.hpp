// Copyright 2026 The clinicl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace clinicl {

// A CSV cell: explicit missing marker, a number, or free text.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& cell) {
  return std::holds_alternative<std::monostate>(cell);
}

// Canonical text of a cell; numbers use the shortest round-trip form and
// missing cells render as "".
std::string cell_text(const Cell& cell);

struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // 1-based physical line on which each row started.
  std::vector<std::size_t> lines;

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::size_t size() const { return rows.size(); }
};

// True for the recognised missing markers: empty, NA, ?, NaN (any case).
bool is_missing_marker(std::string_view text);

// RFC-4180 parser: quoted fields, doubled quotes, embedded newlines, CRLF.
// Every record must have as many fields as the header. Throws kMalformedCsv
// with the offending line in Error::detail().
RawTable parse_csv(std::string_view text);

RawTable read_csv_file(const std::string& path);

// Inverse of parse_csv for tables whose cells round-trip through cell_text.
std::string write_csv(const RawTable& table);

}  // namespace clinicl
