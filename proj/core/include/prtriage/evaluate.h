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

#ifndef PRTRIAGE_EVALUATE_H_
#define PRTRIAGE_EVALUATE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prtriage/analysis.h"
#include "prtriage/features.h"
#include "prtriage/gbdt.h"
#include "prtriage/labeling.h"
#include "prtriage/linear.h"
#include "prtriage/metrics.h"
#include "prtriage/splits.h"

namespace prtriage {

inline constexpr const char* kModelGbdt = "gbdt";
inline constexpr const char* kModelSizeOnly = "size_only";
inline constexpr const char* kModelPathTokens = "path_tokens";

struct EvalOptions {
  FeatureStage stage = FeatureStage::kT0;
  FeatureConfig features;
  LabelConfig labels;
  GbdtParams gbdt;
  std::vector<SplitKind> splits{SplitKind::kTemporal, SplitKind::kRepoDisjoint,
                                SplitKind::kLeaveOneAgentOut};
  double train_fraction = 0.8;
  double budget = 0.2;
  int bootstrap_replicates = 1000;
  double alpha = 0.05;
  int importance_repeats = 5;
  bool baselines = true;
  bool importance = true;
  std::uint64_t seed = 0;
  int num_threads = 1;

  void Validate() const;
};

struct MetricRow {
  std::string model;
  std::string metric;  // roc_auc, pr_auc, precision_at_budget, recall_at_budget
  Interval value;
};

struct TopKPoint {
  std::string model;
  double budget = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct QuartileRow {
  std::string stratum;
  std::int64_t upper = 0;  // inclusive; -1 for the unbounded top stratum
  std::size_t n = 0;
  std::size_t positives = 0;
  // NaN when the stratum lacks one of the classes.
  double gbdt_auc = 0.0;
  double size_only_auc = 0.0;
  double gbdt_precision = 0.0;
  double size_only_precision = 0.0;
};

// Held-out scores, in ascending id order.
struct Predictions {
  std::vector<std::string> ids;
  std::vector<std::int64_t> total_changes;
  std::vector<std::uint8_t> labels;
  std::vector<double> gbdt;
  std::vector<double> size_only;    // empty without baselines
  std::vector<double> path_tokens;  // empty when not trained
};

struct SplitResult {
  std::string split;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::int64_t threshold = 0;
  double train_prevalence = 0.0;
  double test_prevalence = 0.0;
  std::vector<MetricRow> metrics;
  std::vector<RocPoint> roc;
  std::vector<CalibrationBin> calibration;
  std::vector<TopKPoint> topk;
  std::vector<QuartileRow> quartiles;
  std::vector<ImportanceEntry> importance;
  Predictions predictions;
};

struct SkippedSplit {
  std::string split;
  std::string reason;
};

struct EvalReport {
  std::uint64_t seed = 0;
  std::string schema_hash;
  double budget = 0.2;
  std::vector<SplitResult> splits;
  std::vector<SkippedSplit> skipped;
  std::vector<std::int64_t> quartile_bounds;  // b1, b2, b3 over the corpus
  std::vector<EcdfPoint> feedback_to_close;
  std::vector<AgentStats> agents;
  std::vector<RegimeStats> regimes;
  std::vector<HeatmapCell> heatmap;
  std::vector<SensitivityRow> sensitivity;
};

// Runs every requested protocol. Splits whose train or test side is
// single-class are recorded in `skipped` rather than failing the run.
EvalReport RunEvaluation(std::span<const PullRequestRecord> records,
                         const EvalOptions& options);

// Curves and tables derived from held-out predictions alone.
void FillCurves(SplitResult& result, double budget,
                std::span<const std::int64_t> quartile_bounds);

// Writes metrics.csv, roc_points.csv, calibration.csv, topk_coverage.csv,
// quartile_auc.csv, importance.csv, ecdf.csv, predictions.csv,
// agent_stats.csv, regimes.csv, ghosting_heatmap.csv and sensitivity.csv.
void WriteEvalReport(const EvalReport& report, const std::filesystem::path& dir);

// Rebuilds roc_points.csv, calibration.csv, topk_coverage.csv and
// quartile_auc.csv from predictions.csv in `dir`.
void RegenerateCurves(const std::filesystem::path& dir);

}  // namespace prtriage

#endif  // PRTRIAGE_EVALUATE_H_
