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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clinicl {

// Shortest decimal form that round-trips: 54.0 -> "54", 0.25 -> "0.25".
std::string format_number(double value);

// Fixed-precision rendering used by report tables.
std::string format_fixed(double value, int decimals);

std::optional<double> parse_number(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view text, char delimiter);

// Replaces every "{name}" occurrence using `values`. Throws kConfigError for
// a placeholder with no value.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values);

// Number of whitespace-separated tokens.
std::size_t count_whitespace_tokens(std::string_view text);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::string& path);
// Writes via a temporary file and rename so readers never see partial files.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace clinicl
