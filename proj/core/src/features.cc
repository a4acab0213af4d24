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

#include "prtriage/features.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <regex>

#include "prtriage/csv.h"
#include "prtriage/errors.h"
#include "prtriage/parallel.h"

namespace prtriage {

namespace {

std::string Lower(std::string_view in) {
  std::string s(in);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

// Lowercase with '+' -> "p", '#' -> "sharp", other punctuation -> '_'.
std::string Slug(std::string_view in) {
  std::string out;
  for (unsigned char c : in) {
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
    } else if (c == '+') {
      out += 'p';
    } else if (c == '#') {
      out += "sharp";
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

bool Contains(const std::vector<std::string>& list, std::string_view s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

bool GlobMatch(std::string_view pattern, std::string_view name) {
  const size_t star = pattern.find('*');
  if (star == std::string_view::npos) return pattern == name;
  const std::string_view prefix = pattern.substr(0, star);
  const std::string_view suffix = pattern.substr(star + 1);
  return name.size() >= prefix.size() + suffix.size() &&
         name.starts_with(prefix) && name.ends_with(suffix);
}

std::uint64_t Fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void AppendList(std::string& out, std::string_view key,
                const std::vector<std::string>& list) {
  out += key;
  out += '=';
  for (size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += '|';
    out += list[i];
  }
  out += '\n';
}

struct PathParts {
  std::vector<std::string> dirs;
  std::string filename;
  std::string stem;
  std::string extension;
};

PathParts SplitPath(const std::string& lower_path) {
  PathParts parts;
  size_t start = 0;
  while (true) {
    const size_t slash = lower_path.find('/', start);
    if (slash == std::string::npos) {
      parts.filename = lower_path.substr(start);
      break;
    }
    if (slash > start) parts.dirs.push_back(lower_path.substr(start, slash - start));
    start = slash + 1;
  }
  const size_t dot = parts.filename.rfind('.');
  if (dot == std::string::npos || dot == 0) {
    parts.stem = parts.filename;
  } else {
    parts.stem = parts.filename.substr(0, dot);
    parts.extension = parts.filename.substr(dot + 1);
  }
  return parts;
}

constexpr double kUnknown = -1.0;

}  // namespace

std::string_view ToString(FeatureStage stage) {
  return stage == FeatureStage::kT0 ? "t0" : "t1";
}

FeatureStage ParseFeatureStage(std::string_view s) {
  if (s == "t0" || s == "T0") return FeatureStage::kT0;
  if (s == "t1" || s == "T1") return FeatureStage::kT1;
  throw Error(ErrorKind::kParse, fmt::format("unknown stage '{}'", s));
}

std::string_view ToString(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::kIntent:
      return "intent";
    case FeatureGroup::kContext:
      return "context";
    case FeatureGroup::kComplexity:
      return "complexity";
  }
  return "context";
}

std::string FeatureConfig::Fingerprint() const {
  std::string out;
  AppendList(out, "test_segments", paths.test_segments);
  AppendList(out, "test_name_prefixes", paths.test_name_prefixes);
  AppendList(out, "test_stem_suffixes", paths.test_stem_suffixes);
  AppendList(out, "test_name_infixes", paths.test_name_infixes);
  AppendList(out, "ci_substrings", paths.ci_substrings);
  AppendList(out, "config_extensions", paths.config_extensions);
  AppendList(out, "config_filenames", paths.config_filenames);
  AppendList(out, "deps_filenames", paths.deps_filenames);
  AppendList(out, "docs_extensions", paths.docs_extensions);
  AppendList(out, "docs_segments", paths.docs_segments);
  AppendList(out, "lockfile_filenames", paths.lockfile_filenames);
  AppendList(out, "agents", agents);
  AppendList(out, "languages", languages);
  return out;
}

FeatureSchema FeatureSchema::Build(FeatureStage stage,
                                   const FeatureConfig& config) {
  FeatureSchema schema;
  schema.stage_ = stage;
  schema.config_ = config;
  auto add = [&](std::string name, FeatureGroup group,
                 FeatureStage at = FeatureStage::kT0) {
    schema.features_.push_back({std::move(name), group, at});
  };
  using G = FeatureGroup;
  for (const char* name :
       {"additions", "deletions", "total_changes", "log1p_additions",
        "log1p_deletions", "log1p_total_changes", "changed_files",
        "change_entropy", "max_file_share"}) {
    add(name, G::kComplexity);
  }
  for (const char* name :
       {"body_length", "title_length", "has_plan", "linked_issue"}) {
    add(name, G::kIntent);
  }
  for (const char* name : {"touches_tests", "touches_ci", "touches_config",
                           "touches_deps", "touches_docs",
                           "touches_lockfile"}) {
    add(name, G::kContext);
  }
  for (const auto& agent : config.agents) add("agent_" + Slug(agent), G::kContext);
  add("agent_other", G::kContext);
  for (const auto& lang : config.languages) add("lang_" + Slug(lang), G::kContext);
  add("lang_other", G::kContext);
  if (stage == FeatureStage::kT1) {
    for (const char* name :
         {"ci_pass", "ci_fail", "ci_none", "bot_comments_pre_review"}) {
      add(name, G::kContext, FeatureStage::kT1);
    }
  }

  std::string canon = "prtriage-features-v1\nstage=";
  canon += ToString(stage);
  canon += '\n';
  for (const auto& f : schema.features_) {
    if (std::count_if(schema.features_.begin(), schema.features_.end(),
                      [&](const FeatureSpec& o) { return o.name == f.name; }) >
        1) {
      ThrowInvalidArgument("duplicate feature name '" + f.name +
                           "' (vocabulary entries collide)");
    }
    canon += f.name;
    canon += ':';
    canon += ToString(f.group);
    canon += '\n';
  }
  canon += config.Fingerprint();
  schema.hash_ = fmt::format("{:016x}", Fnv1a64(canon));
  return schema;
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

std::optional<std::size_t> FeatureSchema::IndexOf(std::string_view name) const {
  for (size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

double ChangeEntropy(std::span<const FileChange> files) {
  double total = 0.0;
  for (const auto& f : files) {
    if (f.changes() > 0) total += static_cast<double>(f.changes());
  }
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const auto& f : files) {
    if (f.changes() <= 0) continue;
    const double p = static_cast<double>(f.changes()) / total;
    h -= p * std::log2(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double MaxFileShare(std::span<const FileChange> files) {
  std::int64_t total = 0;
  std::int64_t best = 0;
  for (const auto& f : files) {
    if (f.changes() <= 0) continue;
    total += f.changes();
    best = std::max(best, f.changes());
  }
  return total > 0 ? static_cast<double>(best) / static_cast<double>(total)
                   : 0.0;
}

bool DetectPlan(std::string_view body) {
  static const std::regex kMarker(
      R"(^[ \t>*_#`+\-]*([0-9]+[.)][ \t]*)?(plan|steps)[*_`]*[ \t]*:)",
      std::regex::ECMAScript | std::regex::icase);
  static const std::regex kHeading(R"(^[ \t]*#{1,6}[ \t]*(plan|steps)\b)",
                                   std::regex::ECMAScript | std::regex::icase);
  size_t start = 0;
  while (start <= body.size()) {
    size_t end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    const std::string_view line = body.substr(start, end - start);
    if (!line.empty() &&
        (std::regex_search(line.begin(), line.end(), kMarker) ||
         std::regex_search(line.begin(), line.end(), kHeading))) {
      return true;
    }
    start = end + 1;
  }
  return false;
}

FileTypeFlags ComputeFileTypeFlags(std::span<const FileChange> files,
                                   const PathPatternTable& t) {
  FileTypeFlags flags;
  for (const auto& f : files) {
    const std::string path = Lower(f.path);
    const PathParts p = SplitPath(path);

    bool is_test = std::any_of(p.dirs.begin(), p.dirs.end(), [&](const auto& d) {
      return Contains(t.test_segments, d);
    });
    for (const auto& prefix : t.test_name_prefixes) {
      is_test = is_test || p.filename.starts_with(prefix);
    }
    for (const auto& suffix : t.test_stem_suffixes) {
      is_test = is_test || p.stem.ends_with(suffix);
    }
    for (const auto& infix : t.test_name_infixes) {
      is_test = is_test || p.filename.find(infix) != std::string::npos;
    }

    const bool is_ci = std::any_of(
        t.ci_substrings.begin(), t.ci_substrings.end(),
        [&](const auto& s) { return path.find(s) != std::string::npos; });

    const bool is_config =
        (!is_ci && !p.extension.empty() &&
         Contains(t.config_extensions, p.extension)) ||
        Contains(t.config_filenames, p.filename);

    const bool is_lockfile = Contains(t.lockfile_filenames, p.filename);
    const bool is_deps =
        is_lockfile ||
        std::any_of(t.deps_filenames.begin(), t.deps_filenames.end(),
                    [&](const auto& g) { return GlobMatch(g, p.filename); });

    const bool is_docs =
        (!p.extension.empty() && Contains(t.docs_extensions, p.extension)) ||
        std::any_of(p.dirs.begin(), p.dirs.end(), [&](const auto& d) {
          return Contains(t.docs_segments, d);
        });

    flags.touches_tests |= is_test;
    flags.touches_ci |= is_ci;
    flags.touches_config |= is_config;
    flags.touches_deps |= is_deps;
    flags.touches_docs |= is_docs;
    flags.touches_lockfile |= is_lockfile;
  }
  return flags;
}

std::size_t CountScalarValues(std::string_view utf8) {
  return static_cast<std::size_t>(
      std::count_if(utf8.begin(), utf8.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
      }));
}

namespace {

void FillT0(const PullRequestRecord& r, const FeatureConfig& config,
            std::vector<double>& v) {
  const double add = static_cast<double>(r.total_additions);
  const double del = static_cast<double>(r.total_deletions);
  const double total = add + del;
  v.push_back(add);
  v.push_back(del);
  v.push_back(total);
  v.push_back(std::log1p(add));
  v.push_back(std::log1p(del));
  v.push_back(std::log1p(total));
  if (r.files_truncated) {
    v.push_back(kUnknown);
    v.push_back(kUnknown);
    v.push_back(kUnknown);
  } else {
    v.push_back(static_cast<double>(r.files.size()));
    v.push_back(ChangeEntropy(r.files));
    v.push_back(MaxFileShare(r.files));
  }

  v.push_back(static_cast<double>(CountScalarValues(r.body)));
  v.push_back(static_cast<double>(CountScalarValues(r.title)));
  v.push_back(DetectPlan(r.body) ? 1.0 : 0.0);
  v.push_back(r.linked_issue ? 1.0 : 0.0);

  if (r.files_truncated) {
    for (int i = 0; i < 6; ++i) v.push_back(kUnknown);
  } else {
    const FileTypeFlags f = ComputeFileTypeFlags(r.files, config.paths);
    for (bool b : {f.touches_tests, f.touches_ci, f.touches_config,
                   f.touches_deps, f.touches_docs, f.touches_lockfile}) {
      v.push_back(b ? 1.0 : 0.0);
    }
  }

  auto one_hot = [&](const std::vector<std::string>& vocab,
                     std::string_view value) {
    const std::string lower = Lower(value);
    bool hit = false;
    for (const auto& entry : vocab) {
      const bool match = !hit && Lower(entry) == lower;
      hit = hit || match;
      v.push_back(match ? 1.0 : 0.0);
    }
    v.push_back(hit ? 0.0 : 1.0);
  };
  one_hot(config.agents, r.agent_name);
  one_hot(config.languages, r.primary_language);
}

void CheckStage(const FeatureSchema& schema, FeatureStage want) {
  if (schema.stage() != want) {
    throw Error(ErrorKind::kSchemaMismatch,
                fmt::format("expected a {} schema, got {}", ToString(want),
                            ToString(schema.stage())));
  }
}

}  // namespace

FeatureVector ExtractT0(const PullRequestRecord& record,
                        const FeatureSchema& schema) {
  CheckStage(schema, FeatureStage::kT0);
  FeatureVector out{FeatureStage::kT0, schema.hash(), {}};
  out.values.reserve(schema.size());
  FillT0(record, schema.config(), out.values);
  if (out.values.size() != schema.size()) {
    throw Error(ErrorKind::kSchemaMismatch, "T0 extractor/schema size drift");
  }
  return out;
}

FeatureVector ExtractT1(const PullRequestRecord& record,
                        const FeatureSchema& schema) {
  CheckStage(schema, FeatureStage::kT1);
  FeatureVector out{FeatureStage::kT1, schema.hash(), {}};
  out.values.reserve(schema.size());
  FillT0(record, schema.config(), out.values);
  out.values.push_back(record.ci_status == CiStatus::kPass ? 1.0 : 0.0);
  out.values.push_back(record.ci_status == CiStatus::kFail ? 1.0 : 0.0);
  out.values.push_back(record.ci_status == CiStatus::kNone ? 1.0 : 0.0);
  std::int64_t bots = 0;
  for (const auto& e : record.timeline) {
    if (e.author_kind == ActorKind::kHuman) break;
    ++bots;
  }
  out.values.push_back(static_cast<double>(bots));
  if (out.values.size() != schema.size()) {
    throw Error(ErrorKind::kSchemaMismatch, "T1 extractor/schema size drift");
  }
  return out;
}

FeatureVector ExtractFeatures(const PullRequestRecord& record,
                              const FeatureSchema& schema) {
  return schema.stage() == FeatureStage::kT0 ? ExtractT0(record, schema)
                                             : ExtractT1(record, schema);
}

std::vector<double> FeatureMatrix::Column(std::size_t c) const {
  std::vector<double> out(rows());
  for (size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::optional<std::size_t> FeatureMatrix::ColumnIndex(
    std::string_view name) const {
  for (size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return i;
  }
  return std::nullopt;
}

FeatureMatrix FeatureMatrix::SelectRows(
    std::span<const std::size_t> selected) const {
  FeatureMatrix out;
  out.schema_hash = schema_hash;
  out.feature_names = feature_names;
  out.ids.reserve(selected.size());
  out.values.reserve(selected.size() * cols());
  for (size_t r : selected) {
    out.ids.push_back(ids[r]);
    const auto src = row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
  }
  return out;
}

FeatureMatrix BuildFeatureMatrix(std::span<const PullRequestRecord> records,
                                 const FeatureSchema& schema,
                                 int num_threads) {
  FeatureMatrix m;
  m.schema_hash = schema.hash();
  m.feature_names = schema.names();
  m.ids.reserve(records.size());
  for (const auto& r : records) m.ids.push_back(r.id);
  m.values.assign(records.size() * schema.size(), 0.0);
  const size_t cols = schema.size();
  ParallelFor(records.size(), num_threads, [&](size_t i) {
    const FeatureVector v = ExtractFeatures(records[i], schema);
    std::copy(v.values.begin(), v.values.end(), m.values.begin() + i * cols);
  });
  return m;
}

void WriteFeatureCsv(std::ostream& out, const FeatureMatrix& matrix,
                     const CsvMetadata& metadata) {
  out << "# schema_hash=" << matrix.schema_hash << '\n';
  for (const auto& [k, v] : metadata) out << "# " << k << '=' << v << '\n';
  std::vector<std::string> header = {"id"};
  header.insert(header.end(), matrix.feature_names.begin(),
                matrix.feature_names.end());
  WriteCsvRow(out, header);
  std::vector<std::string> fields;
  for (size_t r = 0; r < matrix.rows(); ++r) {
    fields.clear();
    fields.push_back(matrix.ids[r]);
    for (double x : matrix.row(r)) fields.push_back(FormatReal(x));
    WriteCsvRow(out, fields);
  }
}

FeatureMatrix ReadFeatureCsv(std::istream& in) {
  const CsvTable table = ReadCsv(in);
  FeatureMatrix m;
  for (const auto& c : table.comments) {
    const std::string_view line = c;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key(line.substr(0, eq));
    key.erase(0, key.find_first_not_of(' '));
    if (key == "schema_hash") m.schema_hash = std::string(line.substr(eq + 1));
  }
  if (table.header.empty() || table.header[0] != "id") {
    throw Error(ErrorKind::kParse, "feature csv must start with an id column");
  }
  m.feature_names.assign(table.header.begin() + 1, table.header.end());
  for (const auto& row : table.rows) {
    m.ids.push_back(row[0]);
    for (size_t c = 1; c < row.size(); ++c) {
      char* end = nullptr;
      const double x = std::strtod(row[c].c_str(), &end);
      if (end == row[c].c_str() || *end != '\0' || !std::isfinite(x)) {
        throw Error(ErrorKind::kParse,
                    fmt::format("bad feature value '{}' for {} in row {}",
                                row[c], m.feature_names[c - 1], row[0]));
      }
      m.values.push_back(x);
    }
  }
  return m;
}

}  // namespace prtriage
