// Copyright 2026 The prtriage Authors.
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

#ifndef PRTRIAGE_CSV_H_
#define PRTRIAGE_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace prtriage {

// Nine significant digits, the precision used by every CSV export.
std::string FormatReal(double value);

// Quotes the field when it contains a comma, quote or newline.
std::string EscapeCsvField(std::string_view field);

void WriteCsvRow(std::ostream& out, const std::vector<std::string>& fields);

// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> SplitCsvLine(std::string_view line);

// A parsed CSV file. Leading lines starting with '#' are metadata comments
// and are kept verbatim (without the '#').
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws Error(kParse) if absent.
  size_t Column(std::string_view name) const;
};

CsvTable ReadCsv(std::istream& in);
CsvTable ReadCsvFile(const std::filesystem::path& path);

}  // namespace prtriage

#endif  // PRTRIAGE_CSV_H_
