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

#include "prtriage/evaluate.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "prtriage/csv.h"
#include "prtriage/errors.h"
#include "prtriage/rng.h"

namespace prtriage {

void EvalOptions::Validate() const {
  labels.Validate();
  gbdt.Validate();
  if (splits.empty()) ThrowInvalidArgument("no splits requested");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    ThrowInvalidArgument("train_fraction must be in (0,1)");
  }
  if (!(budget > 0.0 && budget <= 1.0)) ThrowInvalidArgument("budget must be in (0,1]");
  if (bootstrap_replicates < 1) ThrowInvalidArgument("bootstrap_replicates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) ThrowInvalidArgument("alpha must be in (0,1)");
  if (importance_repeats < 1) ThrowInvalidArgument("importance_repeats must be >= 1");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Num(double v) { return std::isnan(v) ? "NA" : FormatReal(v); }

bool BothClasses(std::span<const std::uint8_t> y) {
  const auto pos = std::count(y.begin(), y.end(), 1);
  return pos > 0 && static_cast<std::size_t>(pos) < y.size();
}

double Prevalence(std::span<const std::uint8_t> y) {
  if (y.empty()) return 0.0;
  return static_cast<double>(std::count(y.begin(), y.end(), 1)) /
         static_cast<double>(y.size());
}

std::vector<MetricFn> StandardMetrics(double budget) {
  return {
      [](Scores s, Labels l) { return RocAuc(s, l); },
      [](Scores s, Labels l) { return PrAuc(s, l); },
      [budget](Scores s, Labels l) { return AtBudget(s, l, budget).precision; },
      [budget](Scores s, Labels l) { return AtBudget(s, l, budget).recall; },
  };
}

constexpr const char* kMetricNames[] = {"roc_auc", "pr_auc",
                                        "precision_at_budget",
                                        "recall_at_budget"};

struct NamedScores {
  const char* model;
  const std::vector<double>* scores;
};

std::vector<NamedScores> ModelScores(const Predictions& p) {
  std::vector<NamedScores> out{{kModelGbdt, &p.gbdt}};
  if (!p.size_only.empty()) out.push_back({kModelSizeOnly, &p.size_only});
  if (!p.path_tokens.empty()) out.push_back({kModelPathTokens, &p.path_tokens});
  return out;
}

std::optional<SplitResult> EvaluateSplit(
    std::span<const PullRequestRecord> records, const FeatureMatrix& matrix,
    const Split& split, std::size_t ordinal, const EvalOptions& options,
    std::span<const std::int64_t> bounds, std::string* skip_reason) {
  const LabelConfig& lc = options.labels;
  std::vector<PullRequestRecord> train_records;
  train_records.reserve(split.train.size());
  for (std::size_t r : split.train) train_records.push_back(records[r]);
  const HighCostThresholds thresholds =
      FitHighCostThresholds(train_records, lc.high_cost_quantile);
  const std::int64_t threshold = lc.effort_variant == EffortVariant::kAllEvents
                                     ? thresholds.all_events
                                     : thresholds.human_only;
  auto label = [&](std::size_t r) -> std::uint8_t {
    return EffortScore(records[r], lc.effort_variant) > threshold;
  };

  std::vector<std::size_t> test = split.test;
  std::sort(test.begin(), test.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].id != records[b].id) return records[a].id < records[b].id;
    return a < b;
  });
  std::vector<std::uint8_t> y_train;
  std::vector<std::uint8_t> y_test;
  for (std::size_t r : split.train) y_train.push_back(label(r));
  for (std::size_t r : test) y_test.push_back(label(r));
  if (!BothClasses(y_train)) {
    *skip_reason = "training labels are single-class";
    return std::nullopt;
  }
  if (!BothClasses(y_test)) {
    *skip_reason = "test labels are single-class";
    return std::nullopt;
  }
  if (y_train.size() < 2 * static_cast<std::size_t>(options.gbdt.min_samples_leaf)) {
    *skip_reason = "training side smaller than 2 * min_samples_leaf";
    return std::nullopt;
  }

  SplitResult result;
  result.split = split.name;
  result.n_train = y_train.size();
  result.n_test = y_test.size();
  result.threshold = threshold;
  result.train_prevalence = Prevalence(y_train);
  result.test_prevalence = Prevalence(y_test);

  const FeatureMatrix x_train = matrix.SelectRows(split.train);
  const FeatureMatrix x_test = matrix.SelectRows(test);
  GbdtParams params = options.gbdt;
  params.seed = DeriveSeed(options.seed, ordinal, 1);
  const GbdtModel model =
      TrainGbdt(x_train, y_train, params, options.num_threads, nullptr);

  Predictions& p = result.predictions;
  p.ids = x_test.ids;
  p.labels = y_test;
  for (std::size_t r : test) p.total_changes.push_back(records[r].total_changes());
  p.gbdt = PredictProba(model, x_test);

  if (options.baselines) {
    const auto size_col = matrix.ColumnIndex("log1p_total_changes");
    if (!size_col) {
      throw Error(ErrorKind::kSchemaMismatch, "schema lacks log1p_total_changes");
    }
    const LinearModel size_model = TrainSizeOnly(x_train.Column(*size_col), y_train);
    for (std::size_t i = 0; i < x_test.rows(); ++i) {
      const double v = x_test.at(i, *size_col);
      p.size_only.push_back(size_model.Predict(std::span<const double>(&v, 1)));
    }
    try {
      const PathTokenModel paths = TrainPathTokenBaseline(train_records, y_train);
      for (std::size_t r : test) p.path_tokens.push_back(paths.Predict(records[r]));
    } catch (const Error&) {
      // Too few files for a vocabulary; the baseline is simply absent.
      p.path_tokens.clear();
    }
  }

  const auto metric_fns = StandardMetrics(options.budget);
  const auto models = ModelScores(p);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto intervals = BootstrapCiMulti(
        metric_fns, *models[m].scores, y_test, options.bootstrap_replicates,
        options.alpha, DeriveSeed(options.seed, ordinal, 100 + m),
        options.num_threads);
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      result.metrics.push_back({models[m].model, kMetricNames[k], intervals[k]});
    }
  }

  FillCurves(result, options.budget, bounds);

  if (options.importance) {
    result.importance = PermutationImportance(
        model, x_test, y_test, options.importance_repeats,
        DeriveSeed(options.seed, ordinal, 200), options.num_threads);
  }
  return result;
}

}  // namespace

void FillCurves(SplitResult& result, double budget,
                std::span<const std::int64_t> bounds) {
  const Predictions& p = result.predictions;
  const std::span<const std::string> ids(p.ids);
  result.roc = RocCurve(p.gbdt, p.labels);
  result.calibration = CalibrationCurve(p.gbdt, p.labels);
  result.topk.clear();
  for (const auto& [model, scores] : ModelScores(p)) {
    for (int k = 1; k <= 100; ++k) {
      const double b = k / 100.0;
      const BudgetMetrics bm = AtBudget(*scores, p.labels, b, ids);
      result.topk.push_back({model, b, bm.precision, bm.recall});
    }
  }

  result.quartiles.clear();
  if (bounds.size() != 3) return;
  std::vector<std::vector<std::size_t>> members(4);
  for (std::size_t i = 0; i < p.ids.size(); ++i) {
    int q = 0;
    while (q < 3 && p.total_changes[i] > bounds[q]) ++q;
    members[q].push_back(i);
  }
  for (int q = 0; q < 4; ++q) {
    QuartileRow row;
    row.stratum = fmt::format("q{}", q + 1);
    row.upper = q < 3 ? bounds[q] : -1;
    row.n = members[q].size();
    std::vector<std::uint8_t> y;
    std::vector<double> g;
    std::vector<double> s;
    std::vector<std::string> sub_ids;
    for (std::size_t i : members[q]) {
      y.push_back(p.labels[i]);
      g.push_back(p.gbdt[i]);
      if (!p.size_only.empty()) s.push_back(p.size_only[i]);
      sub_ids.push_back(p.ids[i]);
      row.positives += p.labels[i];
    }
    const bool both = BothClasses(y);
    row.gbdt_auc = both ? RocAuc(g, y) : kNaN;
    row.size_only_auc = both && !s.empty() ? RocAuc(s, y) : kNaN;
    row.gbdt_precision =
        y.empty() ? kNaN : AtBudget(g, y, budget, sub_ids).precision;
    row.size_only_precision = y.empty() || s.empty()
                                  ? kNaN
                                  : AtBudget(s, y, budget, sub_ids).precision;
    result.quartiles.push_back(row);
  }
}

EvalReport RunEvaluation(std::span<const PullRequestRecord> records,
                         const EvalOptions& options) {
  options.Validate();
  if (records.size() < 2) {
    throw Error(ErrorKind::kDegenerateData, "evaluation needs at least 2 records");
  }
  const FeatureSchema schema = FeatureSchema::Build(options.stage, options.features);
  const FeatureMatrix matrix =
      BuildFeatureMatrix(records, schema, options.num_threads);

  EvalReport report;
  report.seed = options.seed;
  report.schema_hash = schema.hash();
  report.budget = options.budget;
  for (const auto& s : SizeQuartileStrata(records)) {
    if (report.quartile_bounds.size() < 3) report.quartile_bounds.push_back(s.upper);
  }

  std::size_t ordinal = 0;
  for (SplitKind kind : options.splits) {
    std::vector<Split> splits;
    try {
      splits = MakeSplits(records,
                          SplitSpec{kind, options.train_fraction, options.seed});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateData) throw;
      report.skipped.push_back({std::string(ToString(kind)), e.what()});
      continue;
    }
    for (const Split& split : splits) {
      std::string reason;
      std::optional<SplitResult> result;
      try {
        result = EvaluateSplit(records, matrix, split, ordinal, options,
                               report.quartile_bounds, &reason);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerateData) throw;
        reason = e.what();
      }
      ++ordinal;
      if (result) {
        report.splits.push_back(std::move(*result));
      } else {
        report.skipped.push_back({split.name, reason});
      }
    }
  }

  const auto durations =
      FeedbackToCloseDurations(records, options.labels.feedback_anchor);
  if (!durations.empty()) report.feedback_to_close = Ecdf(durations);
  report.agents = ComputeAgentStats(records, options.labels);
  report.regimes =
      ComputeRegimeStats(records, options.labels, options.features.paths);
  report.heatmap = GhostingHeatmap(records, options.labels, options.features.paths);

  std::vector<std::size_t> train_rows;
  try {
    train_rows = TemporalSplit(records, options.train_fraction).train;
  } catch (const Error&) {
    train_rows.resize(records.size());
    std::iota(train_rows.begin(), train_rows.end(), 0);
  }
  report.sensitivity = SensitivityAnalysis(records, train_rows, options.labels);
  return report;
}

namespace {

struct Header {
  std::uint64_t seed = 0;
  std::string schema_hash;
};

std::ofstream OpenReportFile(const std::filesystem::path& path,
                             const Header& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "# seed=" << header.seed << '\n';
  out << "# schema_hash=" << header.schema_hash << '\n';
  return out;
}

void Close(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

void WriteCurveFiles(const std::vector<SplitResult>& splits,
                     const Header& header, const std::filesystem::path& dir) {
  {
    const auto path = dir / "roc_points.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"split", "model", "fpr", "tpr", "threshold"});
    for (const auto& s : splits) {
      for (const auto& pt : s.roc) {
        WriteCsvRow(out, {s.split, kModelGbdt, Num(pt.fpr), Num(pt.tpr),
                          std::isinf(pt.threshold) ? "inf" : Num(pt.threshold)});
      }
    }
    Close(out, path);
  }
  {
    const auto path = dir / "calibration.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"split", "model", "bin_mid", "mean_pred", "frac_pos", "count"});
    for (const auto& s : splits) {
      for (const auto& b : s.calibration) {
        WriteCsvRow(out, {s.split, kModelGbdt, Num(b.bin_mid), Num(b.mean_pred),
                          Num(b.frac_pos), std::to_string(b.count)});
      }
    }
    Close(out, path);
  }
  {
    const auto path = dir / "topk_coverage.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"split", "model", "budget", "precision", "recall"});
    for (const auto& s : splits) {
      for (const auto& t : s.topk) {
        WriteCsvRow(out, {s.split, t.model, Num(t.budget), Num(t.precision),
                          Num(t.recall)});
      }
    }
    Close(out, path);
  }
  {
    const auto path = dir / "quartile_auc.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"split", "stratum", "upper_total_changes", "n", "positives",
                      "gbdt_auc", "size_only_auc", "gbdt_precision_at_budget",
                      "size_only_precision_at_budget", "precision_lift"});
    for (const auto& s : splits) {
      for (const auto& q : s.quartiles) {
        WriteCsvRow(out, {s.split, q.stratum,
                          q.upper < 0 ? "inf" : std::to_string(q.upper),
                          std::to_string(q.n), std::to_string(q.positives),
                          Num(q.gbdt_auc), Num(q.size_only_auc),
                          Num(q.gbdt_precision), Num(q.size_only_precision),
                          Num(q.gbdt_precision - q.size_only_precision)});
      }
    }
    Close(out, path);
  }
}

}  // namespace

void WriteEvalReport(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
  const Header header{report.seed, report.schema_hash};

  {
    const auto path = dir / "metrics.csv";
    auto out = OpenReportFile(path, header);
    out << "# budget=" << FormatReal(report.budget) << '\n';
    for (const auto& s : report.skipped) {
      out << "# skipped split=" << s.split << " reason=" << s.reason << '\n';
    }
    WriteCsvRow(out, {"split", "model", "metric", "point", "ci_low", "ci_high",
                      "skipped_resamples", "n_train", "n_test", "threshold",
                      "test_prevalence"});
    for (const auto& s : report.splits) {
      for (const auto& m : s.metrics) {
        WriteCsvRow(out, {s.split, m.model, m.metric, Num(m.value.point),
                          Num(m.value.low), Num(m.value.high),
                          std::to_string(m.value.skipped), std::to_string(s.n_train),
                          std::to_string(s.n_test), std::to_string(s.threshold),
                          Num(s.test_prevalence)});
      }
    }
    Close(out, path);
  }

  WriteCurveFiles(report.splits, header, dir);

  {
    const auto path = dir / "importance.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"split", "rank", "feature", "mean_auc_drop", "split_gain_share"});
    for (const auto& s : report.splits) {
      for (std::size_t i = 0; i < s.importance.size(); ++i) {
        const auto& e = s.importance[i];
        WriteCsvRow(out, {s.split, std::to_string(i + 1), e.feature,
                          Num(e.mean_drop), Num(e.split_gain)});
      }
    }
    Close(out, path);
  }
  {
    const auto path = dir / "ecdf.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"feedback_to_close_seconds", "cumulative"});
    for (const auto& pt : report.feedback_to_close) {
      WriteCsvRow(out, {Num(pt.x), Num(pt.cumulative)});
    }
    Close(out, path);
  }
  {
    const auto path = dir / "predictions.csv";
    auto out = OpenReportFile(path, header);
    out << "# budget=" << FormatReal(report.budget) << '\n';
    std::string bounds;
    for (std::size_t i = 0; i < report.quartile_bounds.size(); ++i) {
      if (i) bounds += ';';
      bounds += std::to_string(report.quartile_bounds[i]);
    }
    out << "# quartile_bounds=" << bounds << '\n';
    WriteCsvRow(out, {"split", "id", "total_changes", "label", kModelGbdt,
                      kModelSizeOnly, kModelPathTokens});
    for (const auto& s : report.splits) {
      const Predictions& p = s.predictions;
      for (std::size_t i = 0; i < p.ids.size(); ++i) {
        WriteCsvRow(out, {s.split, p.ids[i], std::to_string(p.total_changes[i]),
                          std::to_string(p.labels[i]), FormatReal(p.gbdt[i]),
                          p.size_only.empty() ? "" : FormatReal(p.size_only[i]),
                          p.path_tokens.empty() ? "" : FormatReal(p.path_tokens[i])});
      }
    }
    Close(out, path);
  }
  {
    const auto path = dir / "agent_stats.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"agent", "total", "instant_rate", "feedback_rejected",
                      "ghosted", "ghosting_rate"});
    for (const auto& a : report.agents) {
      WriteCsvRow(out, {a.agent, std::to_string(a.total), Num(a.instant_rate()),
                        std::to_string(a.feedback_rejected),
                        std::to_string(a.ghosted), Num(a.ghosting_rate())});
    }
    Close(out, path);
  }
  {
    const auto path = dir / "regimes.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"regime", "count", "median_total_changes", "config_rate",
                      "ci_rate", "tests_rate", "plan_rate", "acceptance_rate"});
    for (const auto& r : report.regimes) {
      WriteCsvRow(out, {r.regime, std::to_string(r.count),
                        Num(r.median_total_changes), Num(r.config_rate),
                        Num(r.ci_rate), Num(r.tests_rate), Num(r.plan_rate),
                        Num(r.acceptance_rate)});
    }
    Close(out, path);
  }
  {
    const auto path = dir / "ghosting_heatmap.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"multi_component", "touches_ci", "feedback_rejected",
                      "ghosted", "ghosting_rate"});
    for (const auto& c : report.heatmap) {
      WriteCsvRow(out, {c.multi_component ? "1" : "0", c.touches_ci ? "1" : "0",
                        std::to_string(c.feedback_rejected),
                        std::to_string(c.ghosted), Num(c.rate())});
    }
    Close(out, path);
  }
  {
    const auto path = dir / "sensitivity.csv";
    auto out = OpenReportFile(path, header);
    WriteCsvRow(out, {"study", "setting", "rate", "agreement_with_default"});
    for (const auto& r : report.sensitivity) {
      WriteCsvRow(out, {r.study, r.setting, Num(r.rate), Num(r.agreement)});
    }
    Close(out, path);
  }
}

namespace {

std::map<std::string, std::string> CommentValues(const CsvTable& table) {
  std::map<std::string, std::string> out;
  for (std::string c : table.comments) {
    const auto start = c.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    c = c.substr(start);
    const auto eq = c.find('=');
    if (eq == std::string::npos || c.find(' ') < eq) continue;
    out.emplace(c.substr(0, eq), c.substr(eq + 1));
  }
  return out;
}

double ParseDouble(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, fmt::format("bad {} '{}'", what, s));
  }
}

}  // namespace

void RegenerateCurves(const std::filesystem::path& dir) {
  const auto path = dir / "predictions.csv";
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kIo, "missing " + path.string());
  }
  const CsvTable table = ReadCsvFile(path);
  const auto meta = CommentValues(table);
  Header header;
  double budget = 0.2;
  std::vector<std::int64_t> bounds;
  if (auto it = meta.find("seed"); it != meta.end()) {
    try {
      header.seed = std::stoull(it->second);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad seed '" + it->second + "'");
    }
  }
  if (auto it = meta.find("schema_hash"); it != meta.end()) header.schema_hash = it->second;
  if (auto it = meta.find("budget"); it != meta.end()) {
    budget = ParseDouble(it->second, "budget");
  }
  if (auto it = meta.find("quartile_bounds"); it != meta.end()) {
    std::string rest = it->second;
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      bounds.push_back(static_cast<std::int64_t>(
          ParseDouble(rest.substr(0, semi), "quartile bound")));
      rest = semi == std::string::npos ? "" : rest.substr(semi + 1);
    }
  }

  const std::size_t c_split = table.Column("split");
  const std::size_t c_id = table.Column("id");
  const std::size_t c_total = table.Column("total_changes");
  const std::size_t c_label = table.Column("label");
  const std::size_t c_gbdt = table.Column(kModelGbdt);
  const std::size_t c_size = table.Column(kModelSizeOnly);
  const std::size_t c_path = table.Column(kModelPathTokens);
  std::vector<SplitResult> splits;
  for (const auto& row : table.rows) {
    if (splits.empty() || splits.back().split != row[c_split]) {
      splits.emplace_back();
      splits.back().split = row[c_split];
    }
    Predictions& p = splits.back().predictions;
    p.ids.push_back(row[c_id]);
    p.total_changes.push_back(
        static_cast<std::int64_t>(ParseDouble(row[c_total], "total_changes")));
    p.labels.push_back(row[c_label] == "1" ? 1 : 0);
    p.gbdt.push_back(ParseDouble(row[c_gbdt], "score"));
    if (!row[c_size].empty()) p.size_only.push_back(ParseDouble(row[c_size], "score"));
    if (!row[c_path].empty()) {
      p.path_tokens.push_back(ParseDouble(row[c_path], "score"));
    }
  }
  for (auto& s : splits) {
    const Predictions& p = s.predictions;
    if ((!p.size_only.empty() && p.size_only.size() != p.ids.size()) ||
        (!p.path_tokens.empty() && p.path_tokens.size() != p.ids.size())) {
      throw Error(ErrorKind::kParse,
                  "predictions.csv: baseline column partially filled in " + s.split);
    }
    FillCurves(s, budget, bounds);
  }
  WriteCurveFiles(splits, header, dir);
}

}  // namespace prtriage
