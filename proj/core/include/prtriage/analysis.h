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

#ifndef PRTRIAGE_ANALYSIS_H_
#define PRTRIAGE_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "prtriage/features.h"
#include "prtriage/gbdt.h"
#include "prtriage/labeling.h"
#include "prtriage/types.h"

namespace prtriage {

struct ImportanceEntry {
  std::string feature;
  double mean_drop = 0.0;   // mean ROC-AUC loss when the column is shuffled
  double split_gain = 0.0;  // share of total split gain (GBDT only)
};

using MatrixScorer = std::function<std::vector<double>(const FeatureMatrix&)>;

// Shuffles one column at a time, rescoring with `score`, and averages the
// AUC drop over `repeats`. Each (feature, repeat) uses its own derived
// stream. Sorted by mean_drop descending, then name.
std::vector<ImportanceEntry> PermutationImportance(
    const MatrixScorer& score, const FeatureMatrix& x,
    std::span<const std::uint8_t> y, int repeats, std::uint64_t seed,
    int num_threads = 1);

// Same, for a boosted model; also fills split_gain.
std::vector<ImportanceEntry> PermutationImportance(
    const GbdtModel& model, const FeatureMatrix& x,
    std::span<const std::uint8_t> y, int repeats, std::uint64_t seed,
    int num_threads = 1);

struct AgentStats {
  std::string agent;
  std::size_t total = 0;
  std::size_t instant = 0;
  // Rejected PRs with human feedback; ghosting rate is conditioned on them.
  std::size_t feedback_rejected = 0;
  std::size_t ghosted = 0;

  double instant_rate() const;
  double ghosting_rate() const;
};

// One row per agent in name order, then an "all" row.
std::vector<AgentStats> ComputeAgentStats(
    std::span<const PullRequestRecord> records, const LabelConfig& config);

struct RegimeStats {
  std::string regime;  // "instant" or "normal"
  std::size_t count = 0;
  double median_total_changes = 0.0;
  double config_rate = 0.0;
  double ci_rate = 0.0;
  double tests_rate = 0.0;
  double plan_rate = 0.0;
  // Merged / (merged + rejected); open PRs are excluded.
  double acceptance_rate = 0.0;
};

std::vector<RegimeStats> ComputeRegimeStats(
    std::span<const PullRequestRecord> records, const LabelConfig& config,
    const PathPatternTable& paths = {});

// Number of distinct top-level directories touched; root files count as
// one component.
std::size_t ComponentCount(std::span<const FileChange> files);

struct HeatmapCell {
  bool multi_component = false;
  bool touches_ci = false;
  std::size_t feedback_rejected = 0;
  std::size_t ghosted = 0;

  double rate() const;
};

// Ghosting rate over rejected-with-feedback PRs, split by multi-component
// (two or more components) and CI touch. Always four cells.
std::vector<HeatmapCell> GhostingHeatmap(
    std::span<const PullRequestRecord> records, const LabelConfig& config,
    const PathPatternTable& paths = {});

struct SensitivityRow {
  std::string study;    // ghosting_timeout, effort_weights, bot_exclusion
  std::string setting;  // e.g. "7", "review=2,comment=1", "human_only"
  double rate = 0.0;    // ghosting or high-cost prevalence
  double agreement = 0.0;  // vs the default labeling
};

// Timeout sweep {7,14,21,30}, review/comment re-weighting and bot
// exclusion. High-cost thresholds are fit on train_rows and applied to all
// records.
std::vector<SensitivityRow> SensitivityAnalysis(
    std::span<const PullRequestRecord> records,
    std::span<const std::size_t> train_rows, const LabelConfig& config);

// Seconds from the anchored human feedback to close for rejected PRs with
// feedback, clamped at 0.
std::vector<double> FeedbackToCloseDurations(
    std::span<const PullRequestRecord> records,
    FeedbackAnchor anchor = FeedbackAnchor::kLast);

}  // namespace prtriage

#endif  // PRTRIAGE_ANALYSIS_H_
