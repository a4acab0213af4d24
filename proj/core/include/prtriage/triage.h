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

#ifndef PRTRIAGE_TRIAGE_H_
#define PRTRIAGE_TRIAGE_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/features.h"
#include "prtriage/timeutil.h"
#include "prtriage/types.h"

namespace prtriage {

enum class TriageAction { kFastTrack, kStandardReview, kFlagHighEffort, kFastFail };

std::string_view ToString(TriageAction action);
TriageAction ParseTriageAction(std::string_view s);

// Rule identifiers, in precedence order.
inline constexpr std::string_view kReasonIssueLinkExempt = "issue_link_exempt";
inline constexpr std::string_view kReasonNoPlanSprawl = "no_plan_sprawl";
inline constexpr std::string_view kReasonSizeFlag = "size_flag";
inline constexpr std::string_view kReasonBudgetRank = "budget_rank";
inline constexpr std::string_view kReasonLowScore = "low_score";
inline constexpr std::string_view kReasonDefault = "default";

struct TriagePolicy {
  double budget = 0.20;
  std::int64_t additions_flag_threshold = 500;
  bool require_plan = true;
  int timeout_days = 14;
  bool issue_link_exempt = true;
  double fast_track_probability_cutoff = 0.05;

  void Validate() const;
};

struct TriageInput {
  std::string id;
  std::int64_t additions = 0;
  bool has_plan = false;
  bool linked_issue = false;
  double score = 0.0;  // predicted probability of high cost
};

TriageInput MakeTriageInput(const PullRequestRecord& record, double score);

struct TriageDecision {
  std::string id;
  TriageAction action = TriageAction::kStandardReview;
  std::vector<std::string> reasons;  // never empty
  double score = 0.0;
};

// Applies the gate rules to one PR. `in_budget` says whether the PR ranks
// inside the batch review budget. Every rule that fires is listed;
// issue_link_exempt appears only when it blocks a fast-fail.
TriageDecision Decide(const TriageInput& input, const TriagePolicy& policy,
                      bool in_budget);

// Replays reasons through the precedence table.
TriageAction ActionFromReasons(std::span<const std::string> reasons);

// Ranks by score descending, ties by ascending id, and marks exactly
// ceil(budget*n) PRs as in budget. Output is in input order.
std::vector<TriageDecision> BatchGate(std::span<const TriageInput> batch,
                                      const TriagePolicy& policy);

struct TimeoutStatus {
  std::string id;
  double days_stale = 0.0;  // since the later of last feedback or reply
  bool expired = false;
};

// Open PRs with at least one human event. Expired iff no commit follows
// the last human event and more than timeout_days have passed since it.
std::vector<TimeoutStatus> TimeoutSweep(std::span<const PullRequestRecord> open_prs,
                                        Timestamp now, const TriagePolicy& policy);

// id,action,score,reasons with reasons joined by ';'.
void WriteDecisionCsv(std::ostream& out, std::span<const TriageDecision> decisions,
                      const CsvMetadata& metadata = {});
// One JSON object per line.
void WriteDecisionJsonl(std::ostream& out,
                        std::span<const TriageDecision> decisions);

}  // namespace prtriage

#endif  // PRTRIAGE_TRIAGE_H_
