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

#ifndef PRTRIAGE_CORPUS_H_
#define PRTRIAGE_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/agent_registry.h"
#include "prtriage/types.h"

namespace prtriage {

struct ParseDiagnostic {
  std::size_t line_number = 0;  // 1-based
  std::string message;
};

struct ParsedCorpus {
  std::vector<PullRequestRecord> records;
  std::vector<ParseDiagnostic> diagnostics;
};

// Parses one corpus line. Commits and timeline are sorted on the way in;
// agent_name is canonicalized through the registry; author_type accepts
// either our enum spelling or a raw forge account type ("Bot", "User"),
// which is then classified. Throws Error(kParse) on malformed JSON, missing
// fields or broken record invariants.
PullRequestRecord ParseRecordLine(std::string_view line,
                                  const AgentRegistry& registry);

// Newline-delimited records. Blank lines are ignored. With strict=false a
// bad line is skipped and reported in diagnostics; with strict=true the
// first bad line throws Error(kParse) naming its line number. A stream that
// fails mid-read throws Error(kIo).
ParsedCorpus ParseCorpus(std::istream& in, bool strict,
                         const AgentRegistry& registry);
ParsedCorpus ReadCorpusFile(const std::filesystem::path& path, bool strict,
                            const AgentRegistry& registry);

// Single line, fields in canonical order, no trailing newline.
std::string SerializeRecord(const PullRequestRecord& record);
void WriteCorpus(std::ostream& out,
                 std::span<const PullRequestRecord> records);
void WriteCorpusFile(const std::filesystem::path& path,
                     std::span<const PullRequestRecord> records);

}  // namespace prtriage

#endif  // PRTRIAGE_CORPUS_H_
