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

#ifndef PRTRIAGE_LABELING_H_
#define PRTRIAGE_LABELING_H_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "prtriage/features.h"
#include "prtriage/types.h"

namespace prtriage {

enum class EffortVariant { kAllEvents, kHumanOnly };
// Which human event "after feedback" is measured from.
enum class FeedbackAnchor { kLast, kFirst };

std::string_view ToString(EffortVariant v);
EffortVariant ParseEffortVariant(std::string_view s);
std::string_view ToString(FeedbackAnchor v);
FeedbackAnchor ParseFeedbackAnchor(std::string_view s);

struct LabelConfig {
  double high_cost_quantile = 0.80;
  int ghosting_timeout_days = 14;
  std::chrono::seconds instant_window{60};
  EffortVariant effort_variant = EffortVariant::kAllEvents;
  FeedbackAnchor feedback_anchor = FeedbackAnchor::kLast;

  // Throws Error(kInvalidArgument) on out-of-range values.
  void Validate() const;
};

// Number of review + comment events; kHumanOnly ignores bot authors.
std::int64_t EffortScore(const PullRequestRecord& record,
                         EffortVariant variant);

struct EffortWeights {
  double review = 1.0;
  double comment = 1.0;
};

// Weighted variant used for the re-weighting sensitivity study.
double WeightedEffort(const PullRequestRecord& record,
                      const EffortWeights& weights, EffortVariant variant);

// Nearest-rank quantile: the ceil(q*n)-th smallest score. A PR is high
// cost iff its score is strictly greater. Throws on empty input or q
// outside (0,1).
std::int64_t HighCostThreshold(std::span<const std::int64_t> training_scores,
                               double quantile);
double HighCostThreshold(std::span<const double> training_scores,
                         double quantile);

// Timestamp of the first/last human timeline event, if any.
std::optional<Timestamp> FeedbackTime(const PullRequestRecord& record,
                                      FeedbackAnchor anchor);

// not_applicable unless rejected with at least one human event; otherwise
// ghosted iff no commit lands in (feedback, feedback + timeout].
GhostingLabel Ghosting(const PullRequestRecord& record, int timeout_days,
                       FeedbackAnchor anchor = FeedbackAnchor::kLast);

bool IsInstantMerge(const PullRequestRecord& record,
                    std::chrono::seconds window);

// Fraction of aligned positions that agree. Throws on length mismatch or
// empty input.
double LabelAgreement(std::span<const std::uint8_t> a,
                      std::span<const std::uint8_t> b);

struct HighCostThresholds {
  std::int64_t all_events = 0;
  std::int64_t human_only = 0;
};

// Fits both variants' thresholds on training records only.
HighCostThresholds FitHighCostThresholds(
    std::span<const PullRequestRecord> training, double quantile);

LabelSet LabelRecord(const PullRequestRecord& record,
                     const HighCostThresholds& thresholds,
                     const LabelConfig& config);

std::vector<LabelSet> LabelRecords(std::span<const PullRequestRecord> records,
                                   const HighCostThresholds& thresholds,
                                   const LabelConfig& config);

// is_high_cost as a 0/1 vector.
std::vector<std::uint8_t> HighCostVector(std::span<const LabelSet> labels);

void WriteLabelCsv(std::ostream& out,
                   std::span<const PullRequestRecord> records,
                   std::span<const LabelSet> labels,
                   const CsvMetadata& metadata = {});

}  // namespace prtriage

#endif  // PRTRIAGE_LABELING_H_
