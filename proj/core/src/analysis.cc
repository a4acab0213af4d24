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

#include "prtriage/analysis.h"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>

#include "prtriage/errors.h"
#include "prtriage/metrics.h"
#include "prtriage/parallel.h"
#include "prtriage/rng.h"

namespace prtriage {

std::vector<ImportanceEntry> PermutationImportance(
    const MatrixScorer& score, const FeatureMatrix& x,
    std::span<const std::uint8_t> y, int repeats, std::uint64_t seed,
    int num_threads) {
  if (x.rows() != y.size()) ThrowInvalidArgument("rows and labels differ");
  if (repeats < 1) ThrowInvalidArgument("repeats must be >= 1");
  const double base = RocAuc(score(x), y);
  const std::size_t cols = x.cols();
  std::vector<double> drops(cols, 0.0);
  ParallelFor(cols, num_threads, [&](std::size_t c) {
    FeatureMatrix shuffled = x;
    std::vector<double> column = x.Column(c);
    double total = 0.0;
    for (int r = 0; r < repeats; ++r) {
      std::vector<double> perm = column;
      Rng rng(DeriveSeed(seed, c, static_cast<std::uint64_t>(r)));
      rng.Shuffle(std::span(perm));
      for (std::size_t i = 0; i < x.rows(); ++i) {
        shuffled.values[i * cols + c] = perm[i];
      }
      total += base - RocAuc(score(shuffled), y);
    }
    drops[c] = total / repeats;
  });
  std::vector<ImportanceEntry> out(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    out[c].feature = x.feature_names[c];
    out[c].mean_drop = drops[c];
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.mean_drop != b.mean_drop) return a.mean_drop > b.mean_drop;
    return a.feature < b.feature;
  });
  return out;
}

std::vector<ImportanceEntry> PermutationImportance(
    const GbdtModel& model, const FeatureMatrix& x,
    std::span<const std::uint8_t> y, int repeats, std::uint64_t seed,
    int num_threads) {
  auto out = PermutationImportance(
      [&](const FeatureMatrix& m) { return PredictProba(model, m); }, x, y,
      repeats, seed, num_threads);
  const auto gains = SplitGainImportance(model);
  for (auto& e : out) {
    for (std::size_t c = 0; c < model.feature_names.size(); ++c) {
      if (model.feature_names[c] == e.feature) e.split_gain = gains[c];
    }
  }
  return out;
}

namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

double AgentStats::instant_rate() const { return Ratio(instant, total); }
double AgentStats::ghosting_rate() const {
  return Ratio(ghosted, feedback_rejected);
}
double HeatmapCell::rate() const { return Ratio(ghosted, feedback_rejected); }

std::vector<AgentStats> ComputeAgentStats(
    std::span<const PullRequestRecord> records, const LabelConfig& config) {
  std::map<std::string, AgentStats> by_agent;
  AgentStats all;
  all.agent = "all";
  for (const auto& r : records) {
    AgentStats& s = by_agent[r.agent_name];
    s.agent = r.agent_name;
    const bool instant = IsInstantMerge(r, config.instant_window);
    const GhostingLabel g =
        Ghosting(r, config.ghosting_timeout_days, config.feedback_anchor);
    for (AgentStats* t : {&s, &all}) {
      ++t->total;
      t->instant += instant;
      if (g != GhostingLabel::kNotApplicable) ++t->feedback_rejected;
      if (g == GhostingLabel::kGhosted) ++t->ghosted;
    }
  }
  std::vector<AgentStats> out;
  for (auto& [name, s] : by_agent) out.push_back(s);
  out.push_back(all);
  return out;
}

std::vector<RegimeStats> ComputeRegimeStats(
    std::span<const PullRequestRecord> records, const LabelConfig& config,
    const PathPatternTable& paths) {
  struct Acc {
    std::vector<double> sizes;
    std::size_t config = 0, ci = 0, tests = 0, plan = 0, merged = 0,
                rejected = 0, known_files = 0;
  };
  Acc acc[2];
  for (const auto& r : records) {
    Acc& a = acc[IsInstantMerge(r, config.instant_window) ? 0 : 1];
    a.sizes.push_back(static_cast<double>(r.total_changes()));
    if (!r.files_truncated) {
      const FileTypeFlags f = ComputeFileTypeFlags(r.files, paths);
      ++a.known_files;
      a.config += f.touches_config;
      a.ci += f.touches_ci;
      a.tests += f.touches_tests;
    }
    a.plan += DetectPlan(r.body);
    a.merged += r.state == PrState::kMerged;
    a.rejected += r.state == PrState::kRejected;
  }
  std::vector<RegimeStats> out;
  const char* names[2] = {"instant", "normal"};
  for (int i = 0; i < 2; ++i) {
    const Acc& a = acc[i];
    RegimeStats s;
    s.regime = names[i];
    s.count = a.sizes.size();
    s.median_total_changes = Median(a.sizes);
    s.config_rate = Ratio(a.config, a.known_files);
    s.ci_rate = Ratio(a.ci, a.known_files);
    s.tests_rate = Ratio(a.tests, a.known_files);
    s.plan_rate = Ratio(a.plan, s.count);
    s.acceptance_rate = Ratio(a.merged, a.merged + a.rejected);
    out.push_back(s);
  }
  return out;
}

std::size_t ComponentCount(std::span<const FileChange> files) {
  std::set<std::string> components;
  for (const auto& f : files) {
    const auto slash = f.path.find('/');
    components.insert(slash == std::string::npos ? std::string(".")
                                                 : f.path.substr(0, slash));
  }
  return components.size();
}

std::vector<HeatmapCell> GhostingHeatmap(
    std::span<const PullRequestRecord> records, const LabelConfig& config,
    const PathPatternTable& paths) {
  std::vector<HeatmapCell> cells(4);
  for (int i = 0; i < 4; ++i) {
    cells[i].multi_component = (i & 2) != 0;
    cells[i].touches_ci = (i & 1) != 0;
  }
  for (const auto& r : records) {
    const GhostingLabel g =
        Ghosting(r, config.ghosting_timeout_days, config.feedback_anchor);
    if (g == GhostingLabel::kNotApplicable || r.files_truncated) continue;
    const bool multi = ComponentCount(r.files) >= 2;
    const bool ci = ComputeFileTypeFlags(r.files, paths).touches_ci;
    HeatmapCell& c = cells[(multi ? 2 : 0) + (ci ? 1 : 0)];
    ++c.feedback_rejected;
    c.ghosted += g == GhostingLabel::kGhosted;
  }
  return cells;
}

namespace {

std::vector<std::uint8_t> HighCostByWeights(
    std::span<const PullRequestRecord> records,
    std::span<const std::size_t> train_rows, const EffortWeights& w,
    const LabelConfig& config) {
  std::vector<double> effort(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    effort[i] = WeightedEffort(records[i], w, config.effort_variant);
  }
  std::vector<double> train;
  for (std::size_t r : train_rows) train.push_back(effort[r]);
  const double t =
      HighCostThreshold(std::span<const double>(train), config.high_cost_quantile);
  std::vector<std::uint8_t> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out[i] = effort[i] > t;
  return out;
}

double Mean(std::span<const std::uint8_t> v) {
  std::size_t s = 0;
  for (auto x : v) s += x;
  return Ratio(s, v.size());
}

}  // namespace

std::vector<SensitivityRow> SensitivityAnalysis(
    std::span<const PullRequestRecord> records,
    std::span<const std::size_t> train_rows, const LabelConfig& config) {
  config.Validate();
  if (records.empty() || train_rows.empty()) {
    ThrowInvalidArgument("sensitivity analysis needs records");
  }
  std::vector<SensitivityRow> out;

  auto ghost_vector = [&](int days) {
    std::vector<std::uint8_t> v;
    for (const auto& r : records) {
      const auto g = Ghosting(r, days, config.feedback_anchor);
      if (g == GhostingLabel::kNotApplicable) continue;
      v.push_back(g == GhostingLabel::kGhosted);
    }
    return v;
  };
  const auto base_ghost = ghost_vector(config.ghosting_timeout_days);
  for (int days : {7, 14, 21, 30}) {
    const auto v = ghost_vector(days);
    SensitivityRow row{"ghosting_timeout", std::to_string(days), Mean(v), 1.0};
    if (!v.empty()) row.agreement = LabelAgreement(v, base_ghost);
    out.push_back(row);
  }

  const auto base_cost = HighCostByWeights(records, train_rows, {1.0, 1.0}, config);
  const EffortWeights variants[] = {{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}};
  for (const auto& w : variants) {
    const auto v = HighCostByWeights(records, train_rows, w, config);
    out.push_back({"effort_weights",
                   fmt::format("review={},comment={}", w.review, w.comment),
                   Mean(v), LabelAgreement(v, base_cost)});
  }

  std::vector<PullRequestRecord> train;
  for (std::size_t r : train_rows) train.push_back(records[r]);
  const auto thresholds = FitHighCostThresholds(train, config.high_cost_quantile);
  std::vector<std::uint8_t> all(records.size());
  std::vector<std::uint8_t> human(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    all[i] = EffortScore(records[i], EffortVariant::kAllEvents) >
             thresholds.all_events;
    human[i] = EffortScore(records[i], EffortVariant::kHumanOnly) >
               thresholds.human_only;
  }
  out.push_back({"bot_exclusion", "all_events", Mean(all), 1.0});
  out.push_back({"bot_exclusion", "human_only", Mean(human),
                 LabelAgreement(all, human)});
  return out;
}

std::vector<double> FeedbackToCloseDurations(
    std::span<const PullRequestRecord> records, FeedbackAnchor anchor) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.state != PrState::kRejected || !r.closed_at) continue;
    const auto f = FeedbackTime(r, anchor);
    if (!f) continue;
    const auto d = std::chrono::duration_cast<std::chrono::seconds>(*r.closed_at - *f);
    out.push_back(std::max<double>(0.0, static_cast<double>(d.count())));
  }
  return out;
}

}  // namespace prtriage
