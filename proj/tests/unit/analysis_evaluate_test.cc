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

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "prtriage/analysis.h"
#include "prtriage/csv.h"
#include "prtriage/errors.h"
#include "prtriage/evaluate.h"
#include "prtriage/gbdt.h"
#include "prtriage/rng.h"
#include "prtriage/synth.h"
#include "test_util.h"

namespace prtriage {
namespace {

namespace fs = std::filesystem;
using testing::At;
using testing::Event;
using testing::MakeRecord;
using testing::MakeRejected;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("prtriage_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(PermutationImportanceTest, OnlyUsedFeatureMatters) {
  Rng rng(1);
  FeatureMatrix x;
  x.schema_hash = "h";
  x.feature_names = {"noise", "signal", "unused"};
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 600; ++i) {
    x.ids.push_back("r" + std::to_string(i));
    const double s = rng.Normal();
    x.values.insert(x.values.end(), {rng.Normal(), s, rng.Normal()});
    y.push_back(s > 0.2);
  }
  const MatrixScorer score = [](const FeatureMatrix& m) { return m.Column(1); };
  const auto ranked = PermutationImportance(score, x, y, 5, 9);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].feature, "signal");
  EXPECT_GT(ranked[0].mean_drop, 0.3);
  EXPECT_EQ(ranked[1].mean_drop, 0.0);
  EXPECT_EQ(ranked[2].mean_drop, 0.0);
  const auto again = PermutationImportance(score, x, y, 5, 9, 4);
  for (size_t i = 0; i < ranked.size(); ++i) {
    EXPECT_EQ(again[i].feature, ranked[i].feature);
    EXPECT_EQ(again[i].mean_drop, ranked[i].mean_drop);
  }

  GbdtParams p;
  p.n_trees = 20;
  const auto model = TrainGbdt(x, y, p);
  const auto gbdt_ranked = PermutationImportance(model, x, y, 3, 2);
  EXPECT_EQ(gbdt_ranked[0].feature, "signal");
  EXPECT_GT(gbdt_ranked[0].split_gain, 0.9);
}

TEST(AnalysisTest, ComponentCount) {
  EXPECT_EQ(ComponentCount(std::vector<FileChange>{{"README.md", 1, 0}}), 1u);
  EXPECT_EQ(ComponentCount(std::vector<FileChange>{{"src/a", 1, 0}, {"src/b/c", 1, 0}}), 1u);
  EXPECT_EQ(ComponentCount(std::vector<FileChange>{{"src/a", 1, 0}, {"setup.py", 1, 0}}), 2u);
  EXPECT_EQ(ComponentCount({}), 0u);
}

TEST(AnalysisTest, HeatmapCellsAndFeedbackDurations) {
  PullRequestRecord ghost = MakeRejected("a#1");
  ghost.files = {{"src/a.py", 4, 1}, {".github/workflows/ci.yml", 4, 1}};
  ghost.timeline = {Event(EventKind::kReview, ActorKind::kHuman, At(1))};
  ghost.closed_at = At(21);
  PullRequestRecord engaged = MakeRejected("a#2");
  engaged.timeline = {Event(EventKind::kReview, ActorKind::kHuman, At(1))};
  engaged.commits.push_back({At(2), "fix"});
  engaged.closed_at = At(3);
  const std::vector<PullRequestRecord> recs{ghost, engaged, MakeRecord("a#3")};
  const auto cells = GhostingHeatmap(recs, LabelConfig{});
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].feedback_rejected, 1u);  // single component, no CI
  EXPECT_EQ(cells[0].ghosted, 0u);
  EXPECT_EQ(cells[3].feedback_rejected, 1u);  // multi component with CI
  EXPECT_EQ(cells[3].ghosted, 1u);
  EXPECT_DOUBLE_EQ(cells[3].rate(), 1.0);
  const auto durations = FeedbackToCloseDurations(recs);
  EXPECT_EQ(durations, (std::vector<double>{20 * 86400.0, 2 * 86400.0}));
}

TEST(AnalysisTest, SensitivityTimeoutRatesNonIncreasing) {
  SynthParams p;
  p.n_prs = 3000;
  p.seed = 4;
  const auto recs = GenerateCorpus(p);
  std::vector<size_t> train(recs.size());
  std::iota(train.begin(), train.end(), 0);
  const auto rows = SensitivityAnalysis(recs, train, LabelConfig{});
  std::vector<double> ghosting;
  bool saw_human_only = false;
  for (const auto& r : rows) {
    EXPECT_GE(r.agreement, 0.0);
    EXPECT_LE(r.agreement, 1.0);
    if (r.study == "ghosting_timeout") ghosting.push_back(r.rate);
    if (r.study == "bot_exclusion" && r.setting == "human_only") {
      saw_human_only = true;
      EXPECT_GE(r.agreement, 0.95);
    }
  }
  ASSERT_EQ(ghosting.size(), 4u);
  for (size_t i = 1; i < ghosting.size(); ++i) EXPECT_LE(ghosting[i], ghosting[i - 1]);
  EXPECT_TRUE(saw_human_only);
}

EvalOptions FastOptions(std::uint64_t seed, int threads) {
  EvalOptions o;
  o.gbdt.n_trees = 25;
  o.gbdt.max_depth = 4;
  o.bootstrap_replicates = 40;
  o.importance_repeats = 1;
  o.seed = seed;
  o.num_threads = threads;
  return o;
}

std::vector<PullRequestRecord> SmallCorpus() {
  SynthParams p;
  p.n_prs = 1500;
  p.seed = 12;
  return GenerateCorpus(p);
}

TEST(EvaluateTest, ReportInvariantsAndFiles) {
  const auto recs = SmallCorpus();
  const EvalReport report = RunEvaluation(recs, FastOptions(5, 2));
  ASSERT_FALSE(report.splits.empty());
  EXPECT_EQ(report.splits[0].split, "temporal");
  EXPECT_EQ(report.quartile_bounds.size(), 3u);
  for (const auto& s : report.splits) {
    EXPECT_EQ(s.predictions.ids.size(), s.n_test);
    EXPECT_TRUE(std::is_sorted(s.predictions.ids.begin(), s.predictions.ids.end()));
    EXPECT_EQ(s.metrics.size() % 4, 0u);
    for (const auto& m : s.metrics) {
      EXPECT_LE(m.value.low, m.value.point) << s.split << " " << m.model << " " << m.metric;
      EXPECT_LE(m.value.point, m.value.high);
      EXPECT_GE(m.value.low, 0.0);
      EXPECT_LE(m.value.high, 1.0);
    }
    EXPECT_EQ(s.topk.size() % 100, 0u);
    EXPECT_EQ(s.quartiles.size(), 4u);
  }
  size_t loao = 0;
  for (const auto& s : report.splits) loao += s.split.rfind("loao:", 0) == 0;
  for (const auto& s : report.skipped) loao += s.split.rfind("loao:", 0) == 0;
  EXPECT_EQ(loao, 4u);

  const fs::path dir = TempDir("eval");
  WriteEvalReport(report, dir);
  for (const char* f : {"metrics.csv", "roc_points.csv", "calibration.csv", "topk_coverage.csv",
                        "quartile_auc.csv", "importance.csv", "ecdf.csv", "predictions.csv",
                        "agent_stats.csv", "regimes.csv", "ghosting_heatmap.csv",
                        "sensitivity.csv"}) {
    ASSERT_TRUE(fs::exists(dir / f)) << f;
    const CsvTable t = ReadCsvFile(dir / f);
    ASSERT_GE(t.comments.size(), 2u) << f;
    EXPECT_EQ(t.comments[0], " seed=5") << f;
    EXPECT_EQ(t.comments[1], " schema_hash=" + report.schema_hash) << f;
  }
  const CsvTable metrics = ReadCsvFile(dir / "metrics.csv");
  EXPECT_EQ(metrics.header,
            (std::vector<std::string>{"split", "model", "metric", "point", "ci_low",
                                      "ci_high", "skipped_resamples", "n_train", "n_test",
                                      "threshold", "test_prevalence"}));

  // Curves regenerate byte-identically from predictions alone.
  const std::string roc = Slurp(dir / "roc_points.csv");
  const std::string topk = Slurp(dir / "topk_coverage.csv");
  const std::string quart = Slurp(dir / "quartile_auc.csv");
  fs::remove(dir / "roc_points.csv");
  std::ofstream(dir / "topk_coverage.csv") << "garbage";
  RegenerateCurves(dir);
  EXPECT_EQ(Slurp(dir / "roc_points.csv"), roc);
  EXPECT_EQ(Slurp(dir / "topk_coverage.csv"), topk);
  EXPECT_EQ(Slurp(dir / "quartile_auc.csv"), quart);
  fs::remove_all(dir);
}

TEST(EvaluateTest, ByteIdenticalAcrossThreadCounts) {
  const auto recs = SmallCorpus();
  EvalOptions o1 = FastOptions(3, 1);
  o1.splits = {SplitKind::kTemporal, SplitKind::kRepoDisjoint};
  EvalOptions o8 = o1;
  o8.num_threads = 8;
  const fs::path d1 = TempDir("det1");
  const fs::path d8 = TempDir("det8");
  WriteEvalReport(RunEvaluation(recs, o1), d1);
  WriteEvalReport(RunEvaluation(recs, o8), d8);
  size_t files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    EXPECT_EQ(Slurp(e.path()), Slurp(d8 / e.path().filename())) << e.path().filename();
    ++files;
  }
  EXPECT_EQ(files, 12u);
  fs::remove_all(d1);
  fs::remove_all(d8);
}

TEST(EvaluateTest, SingleClassSplitIsSkipped) {
  std::vector<PullRequestRecord> recs;
  for (int i = 0; i < 120; ++i) {
    PullRequestRecord r = MakeRecord("o/r#" + std::to_string(i));
    r.created_at = At(i);
    r.merged_at = r.created_at + std::chrono::hours(2);
    r.closed_at = r.merged_at;
    r.commits.clear();
    recs.push_back(r);
  }
  EvalOptions o = FastOptions(1, 1);
  o.splits = {SplitKind::kTemporal};
  const auto report = RunEvaluation(recs, o);
  EXPECT_TRUE(report.splits.empty());
  ASSERT_EQ(report.skipped.size(), 1u);
  EXPECT_EQ(report.skipped[0].split, "temporal");
}

TEST(EvalOptionsTest, Validation) {
  EvalOptions o;
  o.Validate();
  o.budget = 0;
  EXPECT_THROW(o.Validate(), Error);
  o = {};
  o.bootstrap_replicates = 0;
  EXPECT_THROW(o.Validate(), Error);
  o = {};
  o.splits.clear();
  EXPECT_THROW(o.Validate(), Error);
}

}  // namespace
}  // namespace prtriage
