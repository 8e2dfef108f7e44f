// Copyright 2026 The Peaqlab Authors. All Rights Reserved.
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

#ifndef PEAQLAB_CSV_HPP_
#define PEAQLAB_CSV_HPP_

#include <string>
#include <vector>

namespace peaqlab {

/// Minimal CSV table: a declared header plus raw string cells. Lines starting
/// with '#' are treated as comments (emitted artifacts carry their manifest
/// that way) and skipped on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line number of each row in the source file, for diagnostics.
  std::vector<int> line_numbers;

  int column(const std::string& name) const;       // -1 if absent
  int require_column(const std::string& name) const;  // throws MissingColumn
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

std::string format_csv_field(double value);

/// Parses a decimal-point real number; rejects decimal commas and trailing
/// garbage.
double parse_real(const std::string& text, const std::string& context);

/// Writes `content` via a temporary file and atomic rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace peaqlab

#endif  // PEAQLAB_CSV_HPP_
