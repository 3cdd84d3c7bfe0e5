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

#include "clinicl/data/csv.hpp"

#include "clinicl/common/error.hpp"
#include "clinicl/common/text.hpp"

namespace clinicl {
namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

Cell make_cell(const Field& field) {
  if (!field.quoted && is_missing_marker(trim(field.text))) return Cell{};
  if (field.quoted && field.text.empty()) return Cell{};
  if (const auto number = parse_number(field.text)) return Cell{*number};
  return Cell{field.text};
}

bool needs_quotes(std::string_view text) {
  return text.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return "";
}

std::optional<std::size_t> RawTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

bool is_missing_marker(std::string_view text) {
  return text.empty() || iequals(text, "na") || text == "?" ||
         iequals(text, "nan");
}

RawTable parse_csv(std::string_view text) {
  RawTable table;
  std::vector<Field> record;
  Field field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool after_quote = false;  // just closed a quoted section
  bool header_done = false;

  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kMalformedCsv,
                "line " + std::to_string(line) + ": " + why,
                static_cast<std::int64_t>(line));
  };

  const auto end_record = [&]() {
    record.push_back(std::move(field));
    field = Field{};
    // A blank physical line is not a record.
    const bool blank = record.size() == 1 && !record[0].quoted &&
                       record[0].text.empty();
    if (!blank) {
      if (!header_done) {
        for (auto& f : record) table.columns.push_back(trim(f.text));
        header_done = true;
      } else {
        if (record.size() != table.columns.size()) {
          line = record_line;
          fail("expected " + std::to_string(table.columns.size()) +
               " fields, found " + std::to_string(record.size()));
        }
        std::vector<Cell> row;
        row.reserve(record.size());
        for (const auto& f : record) row.push_back(make_cell(f));
        table.rows.push_back(std::move(row));
        table.lines.push_back(record_line);
      }
    }
    record.clear();
    after_quote = false;
  };

  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text += '"';
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.text += c;
      }
      continue;
    }
    if (c == ',') {
      record.push_back(std::move(field));
      field = Field{};
      after_quote = false;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      ++line;
      record_line = line;
    } else if (c == '"') {
      if (after_quote || !trim(field.text).empty()) {
        fail("unexpected quote inside unquoted field");
      }
      field.text.clear();
      field.quoted = true;
      in_quotes = true;
    } else {
      if (after_quote) {
        if (c == ' ' || c == '\t') continue;
        fail("text after closing quote");
      }
      field.text += c;
    }
  }
  if (in_quotes) fail("unterminated quoted field");
  if (!record.empty() || !field.text.empty() || field.quoted) end_record();
  if (!header_done) {
    throw Error(ErrorCode::kMalformedCsv, "missing header row", 1);
  }
  return table;
}

RawTable read_csv_file(const std::string& path) {
  return parse_csv(read_file(path));
}

std::string write_csv(const RawTable& table) {
  std::string out;
  const auto emit = [&out](std::string_view text) {
    if (needs_quotes(text)) {
      out += '"';
      for (const char c : text) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    } else {
      out += text;
    }
  };
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    emit(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      emit(cell_text(row[c]));
    }
    out += '\n';
  }
  return out;
}

}  // namespace clinicl
