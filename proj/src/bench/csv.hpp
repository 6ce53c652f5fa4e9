// Copyright 2026 The infer Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace infer {

using CsvCell = std::variant<std::int64_t, double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Integers verbatim, floats with 9 significant digits, strings quoted only
/// when they contain a comma, quote or newline.
std::string format_cell(const CsvCell& cell);

void write_csv(const CsvTable& table, std::ostream& out);

/// Throws std::runtime_error when the file cannot be written.
void write_csv(const CsvTable& table, const std::string& path);

/// Splits RFC 4180 style records into raw fields.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace infer
