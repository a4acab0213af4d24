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

#include "prtriage/corpus.h"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "prtriage/errors.h"

namespace prtriage {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void Missing(std::string_view field) {
  throw Error(ErrorKind::kParse, fmt::format("missing field '{}'", field));
}

const json& Field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) Missing(name);
  return *it;
}

std::string StringField(const json& obj, const char* name) {
  const json& v = Field(obj, name);
  if (v.is_null()) return "";
  if (!v.is_string()) {
    throw Error(ErrorKind::kParse,
                fmt::format("field '{}' is not a string", name));
  }
  return v.get<std::string>();
}

std::int64_t IntField(const json& obj, const char* name) {
  const json& v = Field(obj, name);
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::kParse,
                fmt::format("field '{}' is not an integer", name));
  }
  return v.get<std::int64_t>();
}

std::optional<Timestamp> OptionalTime(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorKind::kParse,
                fmt::format("field '{}' is not a timestamp string", name));
  }
  return ParseIso8601(it->get<std::string>());
}

Timestamp TimeField(const json& obj, const char* name) {
  auto t = OptionalTime(obj, name);
  if (!t) Missing(name);
  return *t;
}

const json& ArrayField(const json& obj, const char* name) {
  const json& v = Field(obj, name);
  if (!v.is_array()) {
    throw Error(ErrorKind::kParse,
                fmt::format("field '{}' is not an array", name));
  }
  return v;
}

AuthorKind ParseAuthorType(const std::string& raw, const std::string& login,
                           const AgentRegistry& registry) {
  if (raw == "generative_agent" || raw == "deterministic_bot" ||
      raw == "human") {
    return ParseAuthorKind(raw);
  }
  // Raw forge account types ("Bot", "User", "Organization").
  return ClassifyAuthor(login, raw, registry);
}

ordered_json OptionalTimeJson(const std::optional<Timestamp>& t) {
  if (!t) return nullptr;
  return FormatIso8601(*t);
}

}  // namespace

PullRequestRecord ParseRecordLine(std::string_view line,
                                  const AgentRegistry& registry) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorKind::kParse, "record not an object");

  PullRequestRecord r;
  try {
    r.id = StringField(obj, "id");
    r.repo_id = StringField(obj, "repo_id");
    const std::string login = StringField(obj, "agent_name");
    r.author_kind =
        ParseAuthorType(StringField(obj, "author_type"), login, registry);
    r.agent_name = CanonicalAgentName(login, registry);
    r.created_at = TimeField(obj, "created_at");
    r.merged_at = OptionalTime(obj, "merged_at");
    r.closed_at = OptionalTime(obj, "closed_at");
    r.state = ParsePrState(StringField(obj, "state"));
    r.title = StringField(obj, "title");
    r.body = StringField(obj, "body");
    r.total_additions = IntField(obj, "total_additions");
    r.total_deletions = IntField(obj, "total_deletions");
    for (const json& f : ArrayField(obj, "files")) {
      r.files.push_back({StringField(f, "path"), IntField(f, "additions"),
                         IntField(f, "deletions")});
    }
    for (const json& c : ArrayField(obj, "commits")) {
      r.commits.push_back({TimeField(c, "timestamp"), StringField(c, "sha")});
    }
    for (const json& e : ArrayField(obj, "timeline")) {
      r.timeline.push_back({ParseEventKind(StringField(e, "kind")),
                            ParseActorKind(StringField(e, "author_kind")),
                            TimeField(e, "timestamp")});
    }
    r.ci_status = ParseCiStatus(StringField(obj, "ci_status"));
    const json& linked = Field(obj, "linked_issue");
    if (!linked.is_boolean()) {
      throw Error(ErrorKind::kParse, "field 'linked_issue' is not a boolean");
    }
    r.linked_issue = linked.get<bool>();
    r.primary_language = StringField(obj, "primary_language");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad record: ") + e.what());
  }

  std::stable_sort(r.commits.begin(), r.commits.end(),
                   [](const Commit& a, const Commit& b) {
                     return a.timestamp < b.timestamp;
                   });
  std::stable_sort(r.timeline.begin(), r.timeline.end(),
                   [](const InteractionEvent& a, const InteractionEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  r.files_truncated = r.files.empty() && r.total_changes() > 0;

  const auto violations = ValidateRecord(r);
  if (!violations.empty()) {
    std::string msg = "record '" + r.id + "' invalid: " + violations.front();
    for (size_t i = 1; i < violations.size(); ++i) msg += "; " + violations[i];
    throw Error(ErrorKind::kParse, msg);
  }
  return r;
}

ParsedCorpus ParseCorpus(std::istream& in, bool strict,
                         const AgentRegistry& registry) {
  ParsedCorpus out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.records.push_back(ParseRecordLine(line, registry));
    } catch (const Error& e) {
      if (strict) {
        throw Error(ErrorKind::kParse,
                    fmt::format("line {}: {}", line_number, e.what()));
      }
      out.diagnostics.push_back({line_number, e.what()});
    }
  }
  if (in.bad()) {
    throw Error(ErrorKind::kIo,
                fmt::format("read failure after line {}", line_number));
  }
  return out;
}

ParsedCorpus ReadCorpusFile(const std::filesystem::path& path, bool strict,
                            const AgentRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return ParseCorpus(in, strict, registry);
}

std::string SerializeRecord(const PullRequestRecord& r) {
  ordered_json obj;
  obj["id"] = r.id;
  obj["repo_id"] = r.repo_id;
  obj["agent_name"] = r.agent_name;
  obj["author_type"] = ToString(r.author_kind);
  obj["created_at"] = FormatIso8601(r.created_at);
  obj["merged_at"] = OptionalTimeJson(r.merged_at);
  obj["closed_at"] = OptionalTimeJson(r.closed_at);
  obj["state"] = ToString(r.state);
  obj["title"] = r.title;
  obj["body"] = r.body;
  obj["total_additions"] = r.total_additions;
  obj["total_deletions"] = r.total_deletions;
  ordered_json files = ordered_json::array();
  for (const auto& f : r.files) {
    files.push_back(ordered_json{
        {"path", f.path}, {"additions", f.additions}, {"deletions", f.deletions}});
  }
  obj["files"] = std::move(files);
  ordered_json commits = ordered_json::array();
  for (const auto& c : r.commits) {
    commits.push_back(ordered_json{{"timestamp", FormatIso8601(c.timestamp)},
                                   {"sha", c.sha}});
  }
  obj["commits"] = std::move(commits);
  ordered_json timeline = ordered_json::array();
  for (const auto& e : r.timeline) {
    timeline.push_back(ordered_json{{"kind", ToString(e.kind)},
                                    {"author_kind", ToString(e.author_kind)},
                                    {"timestamp", FormatIso8601(e.timestamp)}});
  }
  obj["timeline"] = std::move(timeline);
  obj["ci_status"] = ToString(r.ci_status);
  obj["linked_issue"] = r.linked_issue;
  obj["primary_language"] = r.primary_language;
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void WriteCorpus(std::ostream& out,
                 std::span<const PullRequestRecord> records) {
  for (const auto& r : records) out << SerializeRecord(r) << '\n';
}

void WriteCorpusFile(const std::filesystem::path& path,
                     std::span<const PullRequestRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  WriteCorpus(out, records);
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace prtriage
