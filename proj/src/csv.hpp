// Copyright 2026 The ODkAnon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ODKANON_SRC_CSV_HPP_
#define ODKANON_SRC_CSV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace odk::csv {

// Minimal CSV reader for the toolkit's own file formats: comma-separated,
// UTF-8, header row required, no quoting (cell tokens and category tokens
// never contain commas). CR from CRLF line endings is stripped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row padded to header size

  // Index of `name` in header, or -1.
  int column(const std::string& name) const;
};

Table read_file(const std::string& path);
Table read_string(const std::string& text, const std::string& origin);

// Locale-independent number formatting: shortest round-trip form.
std::string format_double(double v);
std::string format_int(std::int64_t v);

// Strict numeric parsing; throws Parse with row/column context on failure.
double parse_double(const std::string& text, std::size_t row, int column,
                    const std::string& what);

void write_file(const std::string& path, const std::string& contents);

}  // namespace odk::csv

#endif  // ODKANON_SRC_CSV_HPP_
