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

#include "prtriage/triage.h"

#include <fmt/format.h>

#include <algorithm>

#include "json.hpp"

#include "prtriage/csv.h"
#include "prtriage/errors.h"
#include "prtriage/labeling.h"
#include "prtriage/metrics.h"

namespace prtriage {

std::string_view ToString(TriageAction action) {
  switch (action) {
    case TriageAction::kFastTrack:
      return "fast_track";
    case TriageAction::kStandardReview:
      return "standard_review";
    case TriageAction::kFlagHighEffort:
      return "flag_high_effort";
    case TriageAction::kFastFail:
      return "fast_fail";
  }
  return "?";
}

TriageAction ParseTriageAction(std::string_view s) {
  for (auto a : {TriageAction::kFastTrack, TriageAction::kStandardReview,
                 TriageAction::kFlagHighEffort, TriageAction::kFastFail}) {
    if (ToString(a) == s) return a;
  }
  throw Error(ErrorKind::kParse, fmt::format("unknown triage action '{}'", s));
}

void TriagePolicy::Validate() const {
  if (!(budget > 0.0 && budget <= 1.0)) ThrowInvalidArgument("budget must be in (0,1]");
  if (additions_flag_threshold <= 0) {
    ThrowInvalidArgument("additions_flag_threshold must be > 0");
  }
  if (timeout_days < 1) ThrowInvalidArgument("timeout_days must be >= 1");
  if (!(fast_track_probability_cutoff >= 0.0 && fast_track_probability_cutoff < 1.0)) {
    ThrowInvalidArgument("fast_track_probability_cutoff must be in [0,1)");
  }
}

TriageInput MakeTriageInput(const PullRequestRecord& record, double score) {
  return {record.id, record.total_additions, DetectPlan(record.body),
          record.linked_issue, score};
}

TriageDecision Decide(const TriageInput& input, const TriagePolicy& policy,
                      bool in_budget) {
  if (!(input.score >= 0.0 && input.score <= 1.0)) {
    ThrowInvalidArgument(fmt::format("score {} for {} outside [0,1]", input.score,
                                     input.id));
  }
  TriageDecision d;
  d.id = input.id;
  d.score = input.score;
  const bool large = input.additions > policy.additions_flag_threshold;
  const bool sprawl = policy.require_plan && !input.has_plan && large;
  if (sprawl) {
    if (policy.issue_link_exempt && input.linked_issue) {
      d.reasons.emplace_back(kReasonIssueLinkExempt);
    } else {
      d.reasons.emplace_back(kReasonNoPlanSprawl);
    }
  }
  if (large) d.reasons.emplace_back(kReasonSizeFlag);
  if (in_budget) d.reasons.emplace_back(kReasonBudgetRank);
  if (input.score < policy.fast_track_probability_cutoff) {
    d.reasons.emplace_back(kReasonLowScore);
  }
  if (d.reasons.empty()) d.reasons.emplace_back(kReasonDefault);
  d.action = ActionFromReasons(d.reasons);
  return d;
}

TriageAction ActionFromReasons(std::span<const std::string> reasons) {
  auto has = [&](std::string_view r) {
    return std::find(reasons.begin(), reasons.end(), r) != reasons.end();
  };
  if (has(kReasonNoPlanSprawl) && !has(kReasonIssueLinkExempt)) {
    return TriageAction::kFastFail;
  }
  if (has(kReasonSizeFlag) || has(kReasonBudgetRank)) {
    return TriageAction::kFlagHighEffort;
  }
  if (has(kReasonLowScore)) return TriageAction::kFastTrack;
  return TriageAction::kStandardReview;
}

std::vector<TriageDecision> BatchGate(std::span<const TriageInput> batch,
                                      const TriagePolicy& policy) {
  policy.Validate();
  if (batch.empty()) ThrowInvalidArgument("empty triage batch");
  std::vector<double> scores;
  std::vector<std::string> ids;
  for (const auto& in : batch) {
    scores.push_back(in.score);
    ids.push_back(in.id);
  }
  const auto order = RankByScore(scores, ids);
  const std::size_t k = BudgetCount(batch.size(), policy.budget);
  std::vector<bool> in_budget(batch.size(), false);
  for (std::size_t i = 0; i < k; ++i) in_budget[order[i]] = true;
  std::vector<TriageDecision> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.push_back(Decide(batch[i], policy, in_budget[i]));
  }
  return out;
}

std::vector<TimeoutStatus> TimeoutSweep(std::span<const PullRequestRecord> open_prs,
                                        Timestamp now, const TriagePolicy& policy) {
  policy.Validate();
  std::vector<TimeoutStatus> out;
  for (const auto& r : open_prs) {
    if (r.state != PrState::kOpen) continue;
    const auto f = FeedbackTime(r, FeedbackAnchor::kLast);
    if (!f) continue;
    Timestamp last_activity = *f;
    bool replied = false;
    for (const auto& c : r.commits) {
      if (c.timestamp > *f) {
        replied = true;
        last_activity = std::max(last_activity, c.timestamp);
      }
    }
    TimeoutStatus s;
    s.id = r.id;
    s.days_stale = static_cast<double>((now - last_activity).count()) /
                   static_cast<double>(std::chrono::seconds(kOneDay).count());
    s.expired = !replied && now - *f > kOneDay * policy.timeout_days;
    out.push_back(s);
  }
  return out;
}

namespace {

std::string JoinReasons(const std::vector<std::string>& reasons) {
  std::string out;
  for (std::size_t i = 0; i < reasons.size(); ++i) {
    if (i) out += ';';
    out += reasons[i];
  }
  return out;
}

}  // namespace

void WriteDecisionCsv(std::ostream& out, std::span<const TriageDecision> decisions,
                      const CsvMetadata& metadata) {
  for (const auto& [k, v] : metadata) out << "# " << k << '=' << v << '\n';
  WriteCsvRow(out, {"id", "action", "score", "reasons"});
  for (const auto& d : decisions) {
    WriteCsvRow(out, {d.id, std::string(ToString(d.action)), FormatReal(d.score),
                      JoinReasons(d.reasons)});
  }
}

void WriteDecisionJsonl(std::ostream& out,
                        std::span<const TriageDecision> decisions) {
  for (const auto& d : decisions) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["action"] = ToString(d.action);
    j["score"] = d.score;
    j["reasons"] = d.reasons;
    out << j.dump() << '\n';
  }
}

}  // namespace prtriage
