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

#include "prtriage/types.h"

#include <fmt/format.h>

#include "prtriage/errors.h"

namespace prtriage {

std::string_view ToString(AuthorKind v) {
  switch (v) {
    case AuthorKind::kGenerativeAgent:
      return "generative_agent";
    case AuthorKind::kDeterministicBot:
      return "deterministic_bot";
    case AuthorKind::kHuman:
      return "human";
  }
  return "human";
}

std::string_view ToString(PrState v) {
  switch (v) {
    case PrState::kOpen:
      return "open";
    case PrState::kMerged:
      return "merged";
    case PrState::kRejected:
      return "rejected";
  }
  return "open";
}

std::string_view ToString(EventKind v) {
  return v == EventKind::kReview ? "review" : "comment";
}

std::string_view ToString(ActorKind v) {
  return v == ActorKind::kHuman ? "human" : "bot";
}

std::string_view ToString(CiStatus v) {
  switch (v) {
    case CiStatus::kPass:
      return "pass";
    case CiStatus::kFail:
      return "fail";
    case CiStatus::kNone:
      return "none";
  }
  return "none";
}

std::string_view ToString(GhostingLabel v) {
  switch (v) {
    case GhostingLabel::kGhosted:
      return "ghosted";
    case GhostingLabel::kEngaged:
      return "engaged";
    case GhostingLabel::kNotApplicable:
      return "not_applicable";
  }
  return "not_applicable";
}

namespace {

[[noreturn]] void Unknown(std::string_view what, std::string_view s) {
  throw Error(ErrorKind::kParse,
              fmt::format("unknown {} value '{}'", what, s));
}

}  // namespace

AuthorKind ParseAuthorKind(std::string_view s) {
  if (s == "generative_agent") return AuthorKind::kGenerativeAgent;
  if (s == "deterministic_bot") return AuthorKind::kDeterministicBot;
  if (s == "human") return AuthorKind::kHuman;
  Unknown("author_type", s);
}

PrState ParsePrState(std::string_view s) {
  if (s == "open") return PrState::kOpen;
  if (s == "merged") return PrState::kMerged;
  if (s == "rejected" || s == "closed") return PrState::kRejected;
  Unknown("state", s);
}

EventKind ParseEventKind(std::string_view s) {
  if (s == "review") return EventKind::kReview;
  if (s == "comment") return EventKind::kComment;
  Unknown("event kind", s);
}

ActorKind ParseActorKind(std::string_view s) {
  if (s == "human") return ActorKind::kHuman;
  if (s == "bot") return ActorKind::kBot;
  Unknown("event author_kind", s);
}

CiStatus ParseCiStatus(std::string_view s) {
  if (s == "pass") return CiStatus::kPass;
  if (s == "fail") return CiStatus::kFail;
  if (s == "none" || s.empty()) return CiStatus::kNone;
  Unknown("ci_status", s);
}

std::vector<std::string> ValidateRecord(const PullRequestRecord& r) {
  std::vector<std::string> out;
  if (r.id.empty()) out.emplace_back("id empty");

  if (r.state == PrState::kMerged && !r.merged_at) {
    out.emplace_back("merged_at missing");
  }
  if (r.state != PrState::kMerged && r.merged_at) {
    out.push_back(fmt::format("merged_at present but state is {}",
                              ToString(r.state)));
  }
  if (r.state == PrState::kOpen && r.closed_at) {
    out.emplace_back("closed_at present but state is open");
  }
  if (r.merged_at && *r.merged_at < r.created_at) {
    out.emplace_back("merged_at before created_at");
  }
  if (r.closed_at && *r.closed_at < r.created_at) {
    out.emplace_back("closed_at before created_at");
  }

  if (r.total_additions < 0) out.emplace_back("total_additions negative");
  if (r.total_deletions < 0) out.emplace_back("total_deletions negative");

  std::int64_t sum_add = 0;
  std::int64_t sum_del = 0;
  for (size_t i = 0; i < r.files.size(); ++i) {
    const FileChange& f = r.files[i];
    if (f.path.empty()) out.push_back(fmt::format("files[{}].path empty", i));
    if (f.additions < 0) {
      out.push_back(fmt::format("files[{}].additions negative", i));
    }
    if (f.deletions < 0) {
      out.push_back(fmt::format("files[{}].deletions negative", i));
    }
    sum_add += f.additions;
    sum_del += f.deletions;
  }
  if (!r.files.empty()) {
    if (sum_add != r.total_additions) {
      out.push_back(fmt::format(
          "total_additions mismatch: files sum {}, total {}", sum_add,
          r.total_additions));
    }
    if (sum_del != r.total_deletions) {
      out.push_back(fmt::format(
          "total_deletions mismatch: files sum {}, total {}", sum_del,
          r.total_deletions));
    }
    if (r.files_truncated) {
      out.emplace_back("files_truncated set but files present");
    }
  }

  for (size_t i = 0; i < r.timeline.size(); ++i) {
    if (r.timeline[i].timestamp < r.created_at) {
      out.push_back(fmt::format("timeline[{}] before created_at", i));
    }
    if (i > 0 && r.timeline[i].timestamp < r.timeline[i - 1].timestamp) {
      out.push_back(fmt::format("timeline not sorted at index {}", i));
    }
  }
  // Commits may predate the PR (authored before it was opened).
  for (size_t i = 1; i < r.commits.size(); ++i) {
    if (r.commits[i].timestamp < r.commits[i - 1].timestamp) {
      out.push_back(fmt::format("commits not sorted at index {}", i));
    }
  }
  return out;
}

}  // namespace prtriage
