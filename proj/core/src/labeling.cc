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

#include "prtriage/labeling.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "prtriage/csv.h"
#include "prtriage/errors.h"

namespace prtriage {

std::string_view ToString(EffortVariant v) {
  return v == EffortVariant::kAllEvents ? "all_events" : "human_only";
}

EffortVariant ParseEffortVariant(std::string_view s) {
  if (s == "all_events") return EffortVariant::kAllEvents;
  if (s == "human_only") return EffortVariant::kHumanOnly;
  throw Error(ErrorKind::kParse, fmt::format("unknown effort variant '{}'", s));
}

std::string_view ToString(FeedbackAnchor v) {
  return v == FeedbackAnchor::kLast ? "last" : "first";
}

FeedbackAnchor ParseFeedbackAnchor(std::string_view s) {
  if (s == "last") return FeedbackAnchor::kLast;
  if (s == "first") return FeedbackAnchor::kFirst;
  throw Error(ErrorKind::kParse, fmt::format("unknown feedback anchor '{}'", s));
}

void LabelConfig::Validate() const {
  if (!(high_cost_quantile > 0.0 && high_cost_quantile < 1.0)) {
    ThrowInvalidArgument("high_cost_quantile must be in (0,1)");
  }
  if (ghosting_timeout_days < 1) {
    ThrowInvalidArgument("ghosting timeout must be >= 1 day");
  }
  if (instant_window.count() < 1) {
    ThrowInvalidArgument("instant window must be >= 1 s");
  }
}

std::int64_t EffortScore(const PullRequestRecord& record,
                         EffortVariant variant) {
  return std::count_if(
      record.timeline.begin(), record.timeline.end(),
      [&](const InteractionEvent& e) {
        return variant == EffortVariant::kAllEvents ||
               e.author_kind == ActorKind::kHuman;
      });
}

double WeightedEffort(const PullRequestRecord& record,
                      const EffortWeights& weights, EffortVariant variant) {
  double sum = 0.0;
  for (const auto& e : record.timeline) {
    if (variant == EffortVariant::kHumanOnly &&
        e.author_kind != ActorKind::kHuman) {
      continue;
    }
    sum += e.kind == EventKind::kReview ? weights.review : weights.comment;
  }
  return sum;
}

namespace {

size_t NearestRankIndex(size_t n, double quantile) {
  if (n == 0) ThrowInvalidArgument("threshold needs nonempty training scores");
  if (!(quantile > 0.0 && quantile < 1.0)) {
    ThrowInvalidArgument("quantile must be in (0,1)");
  }
  // The epsilon keeps exact products such as 0.8*10 from rounding up.
  auto rank = static_cast<size_t>(
      std::ceil(quantile * static_cast<double>(n) - 1e-9));
  rank = std::clamp<size_t>(rank, 1, n);
  return rank - 1;
}

template <typename T>
T NearestRank(std::span<const T> scores, double quantile) {
  const size_t k = NearestRankIndex(scores.size(), quantile);
  std::vector<T> v(scores.begin(), scores.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k),
                   v.end());
  return v[k];
}

}  // namespace

std::int64_t HighCostThreshold(std::span<const std::int64_t> training_scores,
                               double quantile) {
  return NearestRank(training_scores, quantile);
}

double HighCostThreshold(std::span<const double> training_scores,
                         double quantile) {
  return NearestRank(training_scores, quantile);
}

std::optional<Timestamp> FeedbackTime(const PullRequestRecord& record,
                                      FeedbackAnchor anchor) {
  std::optional<Timestamp> out;
  for (const auto& e : record.timeline) {
    if (e.author_kind != ActorKind::kHuman) continue;
    if (anchor == FeedbackAnchor::kFirst) return e.timestamp;
    out = e.timestamp;
  }
  return out;
}

GhostingLabel Ghosting(const PullRequestRecord& record, int timeout_days,
                       FeedbackAnchor anchor) {
  if (record.state != PrState::kRejected) return GhostingLabel::kNotApplicable;
  const auto feedback = FeedbackTime(record, anchor);
  if (!feedback) return GhostingLabel::kNotApplicable;
  const Timestamp deadline = *feedback + timeout_days * kOneDay;
  const bool followed_up = std::any_of(
      record.commits.begin(), record.commits.end(), [&](const Commit& c) {
        return c.timestamp > *feedback && c.timestamp <= deadline;
      });
  return followed_up ? GhostingLabel::kEngaged : GhostingLabel::kGhosted;
}

bool IsInstantMerge(const PullRequestRecord& record,
                    std::chrono::seconds window) {
  return record.state == PrState::kMerged && record.merged_at &&
         (*record.merged_at - record.created_at) < window;
}

double LabelAgreement(std::span<const std::uint8_t> a,
                      std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    ThrowInvalidArgument(fmt::format("label lists differ in length ({} vs {})",
                                     a.size(), b.size()));
  }
  if (a.empty()) ThrowInvalidArgument("label agreement of empty lists");
  size_t same = 0;
  for (size_t i = 0; i < a.size(); ++i) same += (a[i] != 0) == (b[i] != 0);
  return static_cast<double>(same) / static_cast<double>(a.size());
}

HighCostThresholds FitHighCostThresholds(
    std::span<const PullRequestRecord> training, double quantile) {
  std::vector<std::int64_t> all;
  std::vector<std::int64_t> human;
  all.reserve(training.size());
  human.reserve(training.size());
  for (const auto& r : training) {
    all.push_back(EffortScore(r, EffortVariant::kAllEvents));
    human.push_back(EffortScore(r, EffortVariant::kHumanOnly));
  }
  return {HighCostThreshold(std::span<const std::int64_t>(all), quantile),
          HighCostThreshold(std::span<const std::int64_t>(human), quantile)};
}

LabelSet LabelRecord(const PullRequestRecord& record,
                     const HighCostThresholds& thresholds,
                     const LabelConfig& config) {
  LabelSet l;
  l.effort_score = EffortScore(record, EffortVariant::kAllEvents);
  l.effort_score_human_only = EffortScore(record, EffortVariant::kHumanOnly);
  l.is_high_cost = config.effort_variant == EffortVariant::kAllEvents
                       ? l.effort_score > thresholds.all_events
                       : l.effort_score_human_only > thresholds.human_only;
  l.ghosting = Ghosting(record, config.ghosting_timeout_days,
                        config.feedback_anchor);
  l.is_instant_merge = IsInstantMerge(record, config.instant_window);
  return l;
}

std::vector<LabelSet> LabelRecords(std::span<const PullRequestRecord> records,
                                   const HighCostThresholds& thresholds,
                                   const LabelConfig& config) {
  config.Validate();
  std::vector<LabelSet> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(LabelRecord(r, thresholds, config));
  return out;
}

std::vector<std::uint8_t> HighCostVector(std::span<const LabelSet> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.is_high_cost ? 1 : 0);
  return out;
}

void WriteLabelCsv(std::ostream& out,
                   std::span<const PullRequestRecord> records,
                   std::span<const LabelSet> labels,
                   const CsvMetadata& metadata) {
  if (records.size() != labels.size()) {
    ThrowInvalidArgument("records and labels differ in length");
  }
  for (const auto& [k, v] : metadata) out << "# " << k << '=' << v << '\n';
  WriteCsvRow(out, {"id", "effort_score", "effort_score_human_only",
                    "is_high_cost", "ghosting", "is_instant_merge"});
  for (size_t i = 0; i < records.size(); ++i) {
    const LabelSet& l = labels[i];
    WriteCsvRow(out, {records[i].id, std::to_string(l.effort_score),
                      std::to_string(l.effort_score_human_only),
                      l.is_high_cost ? "1" : "0",
                      std::string(ToString(l.ghosting)),
                      l.is_instant_merge ? "1" : "0"});
  }
}

}  // namespace prtriage
