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

#ifndef PRTRIAGE_FEATURES_H_
#define PRTRIAGE_FEATURES_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prtriage/types.h"

namespace prtriage {

enum class FeatureStage { kT0, kT1 };
enum class FeatureGroup { kIntent, kContext, kComplexity };

std::string_view ToString(FeatureStage stage);
FeatureStage ParseFeatureStage(std::string_view s);
std::string_view ToString(FeatureGroup group);

// Path classification rules. Matching is case-insensitive on the full
// repo-relative path. Editing any list changes the schema hash.
struct PathPatternTable {
  std::vector<std::string> test_segments{"test", "tests", "__tests__"};
  std::vector<std::string> test_name_prefixes{"test_"};
  std::vector<std::string> test_stem_suffixes{"_test"};
  std::vector<std::string> test_name_infixes{".spec."};
  std::vector<std::string> ci_substrings{".github/workflows/", ".gitlab-ci",
                                         "jenkinsfile", ".circleci/",
                                         "azure-pipelines"};
  std::vector<std::string> config_extensions{"yml", "yaml", "toml", "ini",
                                             "cfg", "conf", "properties"};
  std::vector<std::string> config_filenames{"dockerfile", "makefile"};
  // Entries may contain one '*' wildcard (e.g. "requirements*.txt").
  std::vector<std::string> deps_filenames{
      "package.json", "requirements*.txt", "pyproject.toml", "go.mod",
      "cargo.toml",   "pom.xml",           "build.gradle"};
  std::vector<std::string> docs_extensions{"md", "rst", "adoc", "txt"};
  std::vector<std::string> docs_segments{"docs"};
  std::vector<std::string> lockfile_filenames{
      "package-lock.json", "yarn.lock",   "pnpm-lock.yaml", "cargo.lock",
      "poetry.lock",       "go.sum",      "gemfile.lock"};
};

struct FeatureConfig {
  PathPatternTable paths;
  // One-hot vocabularies; an "other" slot is always appended.
  std::vector<std::string> agents{"Codex", "Claude", "Devin", "Copilot"};
  std::vector<std::string> languages{"Python", "TypeScript", "JavaScript",
                                     "Go",     "Rust",       "Java",
                                     "C++",    "C#",         "Ruby",
                                     "PHP"};

  // Canonical text of every list, hashed into the schema.
  std::string Fingerprint() const;
};

struct FeatureSpec {
  std::string name;
  FeatureGroup group;
  FeatureStage stage;
};

// Ordered, hash-pinned list of feature columns for one stage.
class FeatureSchema {
 public:
  static FeatureSchema Build(FeatureStage stage,
                             const FeatureConfig& config = {});

  FeatureStage stage() const { return stage_; }
  const FeatureConfig& config() const { return config_; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  std::vector<std::string> names() const;
  std::optional<std::size_t> IndexOf(std::string_view name) const;
  // 16 lowercase hex digits of FNV-1a/64 over names and config.
  const std::string& hash() const { return hash_; }

 private:
  FeatureStage stage_ = FeatureStage::kT0;
  FeatureConfig config_;
  std::vector<FeatureSpec> features_;
  std::string hash_;
};

// Values aligned with the schema it was extracted with.
struct FeatureVector {
  FeatureStage stage = FeatureStage::kT0;
  std::string schema_hash;
  std::vector<double> values;
};

struct FileTypeFlags {
  bool touches_tests = false;
  bool touches_ci = false;
  bool touches_config = false;
  bool touches_deps = false;
  bool touches_docs = false;
  bool touches_lockfile = false;

  bool operator==(const FileTypeFlags&) const = default;
};

// Shannon entropy in bits of per-file shares of changed lines; files with
// no changed lines are ignored.
double ChangeEntropy(std::span<const FileChange> files);

// Largest single-file share of changed lines, 0 when nothing changed.
double MaxFileShare(std::span<const FileChange> files);

// Line-anchored "plan:"/"steps:" markers (markdown markup allowed before
// the keyword) or a "## plan"/"## steps" heading.
bool DetectPlan(std::string_view body);

FileTypeFlags ComputeFileTypeFlags(std::span<const FileChange> files,
                                   const PathPatternTable& table = {});

// Number of Unicode scalar values in a UTF-8 string.
std::size_t CountScalarValues(std::string_view utf8);

// Creation-time features. Reads only fields known when the PR is opened.
// Throws Error(kSchemaMismatch) if the schema is not a T0 schema.
FeatureVector ExtractT0(const PullRequestRecord& record,
                        const FeatureSchema& schema);

// T0 plus CI outcome one-hot and the count of bot timeline events strictly
// before the first human one (all bot events when no human event exists).
FeatureVector ExtractT1(const PullRequestRecord& record,
                        const FeatureSchema& schema);

FeatureVector ExtractFeatures(const PullRequestRecord& record,
                              const FeatureSchema& schema);

struct FeatureMatrix {
  std::string schema_hash;
  std::vector<std::string> feature_names;
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major, rows() x cols()

  std::size_t rows() const { return ids.size(); }
  std::size_t cols() const { return feature_names.size(); }
  double at(std::size_t r, std::size_t c) const {
    return values[r * cols() + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }
  std::vector<double> Column(std::size_t c) const;
  std::optional<std::size_t> ColumnIndex(std::string_view name) const;
  FeatureMatrix SelectRows(std::span<const std::size_t> rows) const;
};

FeatureMatrix BuildFeatureMatrix(std::span<const PullRequestRecord> records,
                                 const FeatureSchema& schema,
                                 int num_threads = 1);

using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

// Leading "# key=value" lines (schema_hash first), then "id,<names...>".
void WriteFeatureCsv(std::ostream& out, const FeatureMatrix& matrix,
                     const CsvMetadata& metadata = {});
FeatureMatrix ReadFeatureCsv(std::istream& in);

}  // namespace prtriage

#endif  // PRTRIAGE_FEATURES_H_
