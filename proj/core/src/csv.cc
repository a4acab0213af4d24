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

#include "prtriage/csv.h"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>

#include "prtriage/errors.h"

namespace prtriage {

std::string FormatReal(double value) { return fmt::format("{:.9g}", value); }

std::string EscapeCsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void WriteCsvRow(std::ostream& out, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << EscapeCsvField(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

size_t CsvTable::Column(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorKind::kParse,
              fmt::format("csv column '{}' not found", name));
}

CsvTable ReadCsv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!have_header && !line.empty() && line[0] == '#') {
      table.comments.push_back(line.substr(1));
      continue;
    }
    if (line.empty() || line == "\r") continue;
    if (!have_header) {
      table.header = SplitCsvLine(line);
      have_header = true;
      continue;
    }
    auto fields = SplitCsvLine(line);
    if (fields.size() != table.header.size()) {
      throw Error(ErrorKind::kParse,
                  fmt::format("csv row {} has {} fields, header has {}",
                              table.rows.size() + 1, fields.size(),
                              table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable ReadCsvFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  return ReadCsv(in);
}

}  // namespace prtriage
