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

#ifndef PRTRIAGE_TYPES_H_
#define PRTRIAGE_TYPES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/timeutil.h"

namespace prtriage {

enum class AuthorKind { kGenerativeAgent, kDeterministicBot, kHuman };
enum class PrState { kOpen, kMerged, kRejected };
enum class EventKind { kReview, kComment };
enum class ActorKind { kHuman, kBot };
enum class CiStatus { kPass, kFail, kNone };
enum class GhostingLabel { kGhosted, kEngaged, kNotApplicable };

std::string_view ToString(AuthorKind v);
std::string_view ToString(PrState v);
std::string_view ToString(EventKind v);
std::string_view ToString(ActorKind v);
std::string_view ToString(CiStatus v);
std::string_view ToString(GhostingLabel v);

// Inverse of ToString. Throw Error(kParse) on unknown spellings.
AuthorKind ParseAuthorKind(std::string_view s);
PrState ParsePrState(std::string_view s);
EventKind ParseEventKind(std::string_view s);
ActorKind ParseActorKind(std::string_view s);
CiStatus ParseCiStatus(std::string_view s);

struct FileChange {
  std::string path;
  std::int64_t additions = 0;
  std::int64_t deletions = 0;

  std::int64_t changes() const { return additions + deletions; }
  bool operator==(const FileChange&) const = default;
};

struct Commit {
  Timestamp timestamp;
  std::string sha;

  bool operator==(const Commit&) const = default;
};

struct InteractionEvent {
  EventKind kind = EventKind::kComment;
  ActorKind author_kind = ActorKind::kHuman;
  Timestamp timestamp;

  bool operator==(const InteractionEvent&) const = default;
};

// Raw metadata of one pull request as mined from the forge. Commits and
// timeline are sorted ascending by timestamp.
struct PullRequestRecord {
  std::string id;
  std::string repo_id;
  std::string agent_name;
  AuthorKind author_kind = AuthorKind::kGenerativeAgent;
  Timestamp created_at;
  std::optional<Timestamp> merged_at;
  std::optional<Timestamp> closed_at;
  PrState state = PrState::kOpen;
  std::string title;
  std::string body;
  std::vector<FileChange> files;
  std::int64_t total_additions = 0;
  std::int64_t total_deletions = 0;
  // Set when the source listed no files but nonzero totals; totals are
  // then authoritative and file-derived features are encoded as unknown.
  bool files_truncated = false;
  std::vector<Commit> commits;
  std::vector<InteractionEvent> timeline;
  CiStatus ci_status = CiStatus::kNone;
  bool linked_issue = false;
  std::string primary_language;

  std::int64_t total_changes() const {
    return total_additions + total_deletions;
  }
  bool operator==(const PullRequestRecord&) const = default;
};

// Returns one human-readable line per broken invariant; empty iff the
// record is well formed. Never throws.
std::vector<std::string> ValidateRecord(const PullRequestRecord& record);

// Per-PR target variables.
struct LabelSet {
  std::int64_t effort_score = 0;
  std::int64_t effort_score_human_only = 0;
  bool is_high_cost = false;
  GhostingLabel ghosting = GhostingLabel::kNotApplicable;
  bool is_instant_merge = false;

  bool operator==(const LabelSet&) const = default;
};

}  // namespace prtriage

#endif  // PRTRIAGE_TYPES_H_
