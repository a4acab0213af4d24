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

#include "cli.h"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prtriage/config.h"
#include "prtriage/corpus.h"
#include "prtriage/csv.h"
#include "prtriage/errors.h"
#include "prtriage/evaluate.h"
#include "prtriage/features.h"
#include "prtriage/forge_client.h"
#include "prtriage/gbdt.h"
#include "prtriage/labeling.h"
#include "prtriage/parallel.h"
#include "prtriage/splits.h"
#include "prtriage/synth.h"
#include "prtriage/triage.h"

namespace prtriage::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string input;
  std::string out;
  std::string model;
  std::string config;
  std::string stage = "t0";
  std::string split = "all";
  std::string jsonl;
  std::string timeouts;
  std::string now;
  std::string forge_url = "https://api.github.com";
  std::vector<std::string> fetch;
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t n = 10000;
  std::optional<double> budget;
  std::optional<double> quantile;
  std::optional<int> timeout_days;
  std::optional<int> replicates;
  std::optional<double> planted;
  bool strict = false;
};

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kInvalidArgument:
      return kExitUsage;
    case ErrorKind::kSchemaMismatch:
      return kExitSchemaMismatch;
    case ErrorKind::kParse:
    case ErrorKind::kDegenerateData:
      return kExitData;
    case ErrorKind::kNotFound:
    case ErrorKind::kRateLimited:
    case ErrorKind::kMapping:
    case ErrorKind::kForge:
      return kExitForge;
  }
  return kExitInternal;
}

std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

int ReportError(std::ostream& err, std::string_view kind, int code,
                const std::string& detail) {
  err << "error kind=" << kind << " exit=" << code << " detail=" << OneLine(detail)
      << '\n';
  return code;
}

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err) {
    if (!o_.config.empty()) {
      RequireFile(o_.config);
      config_ = LoadConfigFile(o_.config);
    }
    if (o_.quantile) config_.label.high_cost_quantile = *o_.quantile;
    if (o_.timeout_days) {
      config_.label.ghosting_timeout_days = *o_.timeout_days;
      config_.triage.timeout_days = *o_.timeout_days;
    }
    if (o_.budget) {
      config_.triage.budget = *o_.budget;
      config_.eval.budget = *o_.budget;
    }
    if (o_.replicates) config_.eval.bootstrap_replicates = *o_.replicates;
    config_.label.Validate();
    config_.triage.Validate();
    config_.gbdt.seed = o_.seed;
    config_.synth.seed = o_.seed;
    config_.eval.features = config_.features;
    config_.eval.labels = config_.label;
    config_.eval.gbdt = config_.gbdt;
    config_.eval.stage = ParseFeatureStage(o_.stage);
    config_.eval.seed = o_.seed;
    config_.eval.num_threads = o_.threads;
  }

  void Ingest();
  void Featurize();
  void Label();
  void Train();
  void Evaluate();
  void Score();
  void Triage();
  void Synth();
  void Report();
  void Pipeline();

 private:
  static void RequireFile(const std::string& path) {
    if (path.empty()) ThrowInvalidArgument("--input is required");
    if (!fs::exists(path)) throw Error(ErrorKind::kIo, "file not found: " + path);
  }

  static void RequireOut(const std::string& path) {
    if (path.empty()) ThrowInvalidArgument("--out is required");
  }

  std::vector<PullRequestRecord> LoadCorpus(const std::string& path) const {
    RequireFile(path);
    ParsedCorpus parsed = ReadCorpusFile(path, o_.strict, config_.registry);
    for (const auto& d : parsed.diagnostics) {
      err_ << "warning line=" << d.line_number << " detail=" << OneLine(d.message)
           << '\n';
    }
    if (parsed.records.empty()) {
      throw Error(ErrorKind::kDegenerateData, "no valid records in " + path);
    }
    return std::move(parsed.records);
  }

  static void EnsureParent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
  }

  static std::ofstream OpenOut(const fs::path& path) {
    EnsureParent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    return out;
  }

  static void Finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
  }

  CsvMetadata Metadata(const std::string& schema_hash) const {
    CsvMetadata m{{"schema_hash", schema_hash}, {"seed", std::to_string(o_.seed)}};
    return m;
  }

  FeatureSchema Schema() const {
    return FeatureSchema::Build(ParseFeatureStage(o_.stage), config_.features);
  }

  std::vector<std::size_t> TrainingRows(
      std::span<const PullRequestRecord> records) const {
    return TemporalSplit(records, config_.eval.train_fraction).train;
  }

  std::vector<LabelSet> LabelWithTrainingThreshold(
      std::span<const PullRequestRecord> records,
      std::span<const std::size_t> train_rows) const {
    std::vector<PullRequestRecord> train;
    for (std::size_t r : train_rows) train.push_back(records[r]);
    const auto thresholds =
        FitHighCostThresholds(train, config_.label.high_cost_quantile);
    return LabelRecords(records, thresholds, config_.label);
  }

  GbdtModel TrainOn(std::span<const PullRequestRecord> records,
                    std::span<const std::size_t> rows) const {
    const FeatureSchema schema = Schema();
    const auto labels = LabelWithTrainingThreshold(records, rows);
    std::vector<PullRequestRecord> subset;
    std::vector<std::uint8_t> y;
    for (std::size_t r : rows) {
      subset.push_back(records[r]);
      y.push_back(labels[r].is_high_cost);
    }
    const FeatureMatrix x = BuildFeatureMatrix(subset, schema, o_.threads);
    return TrainGbdt(x, y, config_.gbdt, o_.threads, nullptr);
  }

  // Schema whose hash matches the model, trying both stages.
  FeatureSchema SchemaForModel(const GbdtModel& model) const {
    for (FeatureStage stage : {FeatureStage::kT0, FeatureStage::kT1}) {
      FeatureSchema s = FeatureSchema::Build(stage, config_.features);
      if (s.hash() == model.schema_hash) return s;
    }
    throw Error(ErrorKind::kSchemaMismatch,
                fmt::format("model schema_hash {} matches no feature schema under "
                            "the current configuration",
                            model.schema_hash));
  }

  std::vector<double> ScoreRecords(const GbdtModel& model,
                                   std::span<const PullRequestRecord> records) const {
    const FeatureSchema schema = SchemaForModel(model);
    return PredictProba(model, BuildFeatureMatrix(records, schema, o_.threads));
  }

  void WriteScores(const fs::path& path, const GbdtModel& model,
                   std::span<const PullRequestRecord> records,
                   std::span<const double> probs) const {
    auto out = OpenOut(path);
    for (const auto& [k, v] : Metadata(model.schema_hash)) {
      out << "# " << k << '=' << v << '\n';
    }
    WriteCsvRow(out, {"id", "probability"});
    for (std::size_t i = 0; i < records.size(); ++i) {
      WriteCsvRow(out, {records[i].id, FormatReal(probs[i])});
    }
    Finish(out, path);
  }

  void WriteDecisions(std::span<const PullRequestRecord> records,
                      std::span<const double> probs, const std::string& schema_hash,
                      const fs::path& csv_path, const std::string& jsonl_path,
                      const std::string& timeouts_path) const {
    std::vector<TriageInput> batch;
    for (std::size_t i = 0; i < records.size(); ++i) {
      batch.push_back(MakeTriageInput(records[i], probs[i]));
    }
    const auto decisions = BatchGate(batch, config_.triage);
    {
      auto out = OpenOut(csv_path);
      WriteDecisionCsv(out, decisions, Metadata(schema_hash));
      Finish(out, csv_path);
    }
    if (!jsonl_path.empty()) {
      auto out = OpenOut(jsonl_path);
      WriteDecisionJsonl(out, decisions);
      Finish(out, jsonl_path);
    }
    if (!timeouts_path.empty()) {
      const auto sweep = TimeoutSweep(records, Now(records), config_.triage);
      auto out = OpenOut(timeouts_path);
      WriteCsvRow(out, {"id", "days_stale", "expired"});
      for (const auto& s : sweep) {
        WriteCsvRow(out, {s.id, FormatReal(s.days_stale), s.expired ? "1" : "0"});
      }
      Finish(out, timeouts_path);
    }
    std::size_t counts[4] = {0, 0, 0, 0};
    for (const auto& d : decisions) ++counts[static_cast<int>(d.action)];
    out_ << fmt::format(
        "triage decisions={} fast_track={} standard_review={} flag_high_effort={} "
        "fast_fail={}\n",
        decisions.size(), counts[0], counts[1], counts[2], counts[3]);
  }

  // --now, or the latest timestamp in the corpus so runs never read the clock.
  Timestamp Now(std::span<const PullRequestRecord> records) const {
    if (!o_.now.empty()) return ParseIso8601(o_.now);
    Timestamp latest = records.front().created_at;
    for (const auto& r : records) {
      latest = std::max(latest, r.created_at);
      if (r.closed_at) latest = std::max(latest, *r.closed_at);
      for (const auto& c : r.commits) latest = std::max(latest, c.timestamp);
      for (const auto& e : r.timeline) latest = std::max(latest, e.timestamp);
    }
    return latest;
  }

  std::vector<SplitKind> SplitKinds() const {
    if (o_.split == "all") {
      return {SplitKind::kTemporal, SplitKind::kRepoDisjoint,
              SplitKind::kLeaveOneAgentOut};
    }
    return {ParseSplitKind(o_.split)};
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  PipelineConfig config_;
};

void Runner::Ingest() {
  RequireOut(o_.out);
  std::vector<PullRequestRecord> records;
  if (!o_.input.empty()) records = LoadCorpus(o_.input);
  if (!o_.fetch.empty()) {
    ForgeClient client(std::shared_ptr<HttpTransport>(MakeHttpTransport(o_.forge_url)),
                       ForgeCredentials::FromEnvironment(), {}, config_.registry);
    std::vector<PullRequestRecord> fetched(o_.fetch.size());
    ParallelFor(o_.fetch.size(), o_.threads, [&](std::size_t i) {
      const std::string& ref = o_.fetch[i];
      const auto hash = ref.rfind('#');
      if (hash == std::string::npos || hash == 0 || hash + 1 == ref.size()) {
        ThrowInvalidArgument("--fetch expects owner/repo#number, got " + ref);
      }
      int number = 0;
      try {
        number = std::stoi(ref.substr(hash + 1));
      } catch (const std::exception&) {
        ThrowInvalidArgument("--fetch expects owner/repo#number, got " + ref);
      }
      fetched[i] = client.FetchPullRequest(ref.substr(0, hash), number);
    });
    records.insert(records.end(), fetched.begin(), fetched.end());
  }
  if (records.empty()) ThrowInvalidArgument("ingest needs --input or --fetch");
  EnsureParent(o_.out);
  WriteCorpusFile(o_.out, records);
  out_ << "ingest records=" << records.size() << '\n';
}

void Runner::Featurize() {
  RequireOut(o_.out);
  const auto records = LoadCorpus(o_.input);
  const FeatureSchema schema = Schema();
  const FeatureMatrix m = BuildFeatureMatrix(records, schema, o_.threads);
  auto out = OpenOut(o_.out);
  CsvMetadata meta{{"stage", std::string(ToString(schema.stage()))},
                   {"seed", std::to_string(o_.seed)}};
  WriteFeatureCsv(out, m, meta);
  Finish(out, o_.out);
  out_ << "featurize rows=" << m.rows() << " cols=" << m.cols()
       << " schema_hash=" << schema.hash() << '\n';
}

void Runner::Label() {
  RequireOut(o_.out);
  const auto records = LoadCorpus(o_.input);
  const auto labels = LabelWithTrainingThreshold(records, TrainingRows(records));
  auto out = OpenOut(o_.out);
  WriteLabelCsv(out, records, labels, {{"seed", std::to_string(o_.seed)}});
  Finish(out, o_.out);
  const auto positives = std::count_if(labels.begin(), labels.end(),
                                       [](const LabelSet& l) { return l.is_high_cost; });
  out_ << "label rows=" << labels.size() << " high_cost=" << positives << '\n';
}

void Runner::Train() {
  RequireOut(o_.out);
  const auto records = LoadCorpus(o_.input);
  std::vector<std::size_t> rows(records.size());
  std::iota(rows.begin(), rows.end(), 0);
  const GbdtModel model = TrainOn(records, rows);
  EnsureParent(o_.out);
  SaveGbdt(model, o_.out);
  out_ << "train rows=" << records.size() << " trees=" << model.trees.size()
       << " schema_hash=" << model.schema_hash << '\n';
}

void Runner::Evaluate() {
  RequireOut(o_.out);
  const auto records = LoadCorpus(o_.input);
  EvalOptions options = config_.eval;
  options.splits = SplitKinds();
  const EvalReport report = RunEvaluation(records, options);
  WriteEvalReport(report, o_.out);
  for (const auto& s : report.skipped) {
    err_ << "warning split=" << s.split << " skipped detail=" << OneLine(s.reason)
         << '\n';
  }
  for (const auto& s : report.splits) {
    for (const auto& m : s.metrics) {
      if (m.model == kModelGbdt && m.metric == "roc_auc") {
        out_ << fmt::format("evaluate split={} roc_auc={} ci=[{}, {}]\n", s.split,
                            FormatReal(m.value.point), FormatReal(m.value.low),
                            FormatReal(m.value.high));
      }
    }
  }
}

void Runner::Score() {
  RequireOut(o_.out);
  RequireFile(o_.model);
  const auto records = LoadCorpus(o_.input);
  const GbdtModel model = LoadGbdt(o_.model);
  const auto probs = ScoreRecords(model, records);
  WriteScores(o_.out, model, records, probs);
  out_ << "score rows=" << probs.size() << '\n';
}

void Runner::Triage() {
  RequireOut(o_.out);
  RequireFile(o_.model);
  const auto records = LoadCorpus(o_.input);
  const GbdtModel model = LoadGbdt(o_.model);
  const auto probs = ScoreRecords(model, records);
  WriteDecisions(records, probs, model.schema_hash, o_.out, o_.jsonl, o_.timeouts);
}

void Runner::Synth() {
  RequireOut(o_.out);
  SynthParams params = config_.synth;
  params.n_prs = o_.n;
  std::vector<PullRequestRecord> records;
  if (o_.planted) {
    records = PlantedSignalCorpus(params, *o_.planted).records;
  } else {
    records = GenerateCorpus(params);
  }
  EnsureParent(o_.out);
  WriteCorpusFile(o_.out, records);
  out_ << "synth records=" << records.size() << " seed=" << o_.seed << '\n';
}

void Runner::Report() {
  if (o_.input.empty()) ThrowInvalidArgument("--input (report directory) is required");
  if (!fs::is_directory(o_.input)) {
    throw Error(ErrorKind::kIo, "report directory not found: " + o_.input);
  }
  RegenerateCurves(o_.input);
  out_ << "report regenerated=" << o_.input << '\n';
}

void Runner::Pipeline() {
  RequireOut(o_.out);
  const fs::path dir = o_.out;
  fs::create_directories(dir);
  std::vector<PullRequestRecord> records;
  if (o_.input.empty()) {
    SynthParams params = config_.synth;
    params.n_prs = o_.n;
    records = o_.planted ? PlantedSignalCorpus(params, *o_.planted).records
                         : GenerateCorpus(params);
    WriteCorpusFile(dir / "corpus.jsonl", records);
  } else {
    records = LoadCorpus(o_.input);
  }

  const FeatureSchema schema = Schema();
  const FeatureMatrix m = BuildFeatureMatrix(records, schema, o_.threads);
  {
    auto out = OpenOut(dir / "features.csv");
    WriteFeatureCsv(out, m, {{"stage", std::string(ToString(schema.stage()))},
                             {"seed", std::to_string(o_.seed)}});
    Finish(out, dir / "features.csv");
  }

  const Split temporal = TemporalSplit(records, config_.eval.train_fraction);
  const auto labels = LabelWithTrainingThreshold(records, temporal.train);
  {
    auto out = OpenOut(dir / "labels.csv");
    WriteLabelCsv(out, records, labels, {{"seed", std::to_string(o_.seed)}});
    Finish(out, dir / "labels.csv");
  }

  const GbdtModel model = TrainOn(records, temporal.train);
  SaveGbdt(model, dir / "model.txt");

  EvalOptions options = config_.eval;
  options.splits = SplitKinds();
  const EvalReport report = RunEvaluation(records, options);
  WriteEvalReport(report, dir / "eval");
  for (const auto& s : report.skipped) {
    err_ << "warning split=" << s.split << " skipped detail=" << OneLine(s.reason)
         << '\n';
  }

  std::vector<PullRequestRecord> test;
  for (std::size_t r : temporal.test) test.push_back(records[r]);
  const auto probs = ScoreRecords(model, test);
  WriteScores(dir / "scores.csv", model, test, probs);
  WriteDecisions(test, probs, model.schema_hash, dir / "decisions.csv",
                 (dir / "decisions.jsonl").string(), (dir / "timeouts.csv").string());
  out_ << "pipeline records=" << records.size() << " out=" << dir.string() << '\n';
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Effort triage for agent-authored pull requests", "prtriage"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Root seed for every random draw");
    sub->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--config", o.config, "JSON config file");
  };
  auto add_io = [&](CLI::App* sub, const char* in_help, const char* out_help) {
    sub->add_option("--input", o.input, in_help);
    sub->add_option("--out", o.out, out_help);
    sub->add_flag("--strict", o.strict, "Fail on the first malformed corpus line");
  };
  auto add_stage = [&](CLI::App* sub) {
    sub->add_option("--stage", o.stage, "Feature snapshot")
        ->check(CLI::IsMember({"t0", "t1"}));
  };
  auto add_label = [&](CLI::App* sub) {
    sub->add_option("--quantile", o.quantile, "High-cost quantile in (0,1)");
    sub->add_option("--timeout-days", o.timeout_days, "Ghosting / staleness timeout");
  };
  auto add_eval = [&](CLI::App* sub) {
    sub->add_option("--split", o.split, "Protocol")
        ->check(CLI::IsMember({"all", "temporal", "repo", "loao", "random"}));
    sub->add_option("--budget", o.budget, "Review budget fraction in (0,1]");
    sub->add_option("--replicates", o.replicates, "Bootstrap replicates");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus");
  add_common(ingest);
  add_io(ingest, "Corpus (JSON lines)", "Normalized corpus");
  ingest->add_option("--fetch", o.fetch, "owner/repo#number to fetch from the forge");
  ingest->add_option("--forge-url", o.forge_url, "Forge API base URL");

  auto* featurize = app.add_subcommand("featurize", "Write a feature matrix");
  add_common(featurize);
  add_io(featurize, "Corpus", "Feature CSV");
  add_stage(featurize);

  auto* label = app.add_subcommand("label", "Write per-PR labels");
  add_common(label);
  add_io(label, "Corpus", "Label CSV");
  add_label(label);

  auto* train = app.add_subcommand("train", "Train the boosted model");
  add_common(train);
  add_io(train, "Training corpus", "Model file");
  add_stage(train);
  add_label(train);

  auto* evaluate = app.add_subcommand("evaluate", "Run the evaluation protocols");
  add_common(evaluate);
  add_io(evaluate, "Corpus", "Report directory");
  add_stage(evaluate);
  add_label(evaluate);
  add_eval(evaluate);

  auto* score = app.add_subcommand("score", "Score PRs with a saved model");
  add_common(score);
  add_io(score, "Corpus", "Probability CSV");
  score->add_option("--model", o.model, "Model file");

  auto* triage = app.add_subcommand("triage", "Gate decisions for a batch");
  add_common(triage);
  add_io(triage, "Corpus", "Decision CSV");
  triage->add_option("--model", o.model, "Model file");
  triage->add_option("--budget", o.budget, "Review budget fraction in (0,1]");
  triage->add_option("--timeout-days", o.timeout_days, "Staleness timeout");
  triage->add_option("--jsonl", o.jsonl, "Also write decisions as JSON lines");
  triage->add_option("--timeouts", o.timeouts, "Write the open-PR timeout sweep");
  triage->add_option("--now", o.now, "Sweep reference time (ISO 8601)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_common(synth);
  synth->add_option("--out", o.out, "Corpus (JSON lines)");
  synth->add_option("--n", o.n, "Number of PRs")->check(CLI::PositiveNumber);
  synth->add_option("--planted", o.planted, "Planted-signal strength");

  auto* report = app.add_subcommand("report", "Regenerate curve CSVs");
  report->add_option("--input", o.input, "Report directory");

  auto* pipeline = app.add_subcommand("pipeline", "synth, featurize, label, train, "
                                                  "evaluate and triage in one run");
  add_common(pipeline);
  add_io(pipeline, "Corpus (default: synthesize one)", "Output directory");
  add_stage(pipeline);
  add_label(pipeline);
  add_eval(pipeline);
  pipeline->add_option("--n", o.n, "Synthetic PRs when no input is given")
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--planted", o.planted, "Planted-signal strength");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return ReportError(err, "usage", kExitUsage, e.what());
  }

  try {
    Runner runner(o, out, err);
    if (*ingest) runner.Ingest();
    if (*featurize) runner.Featurize();
    if (*label) runner.Label();
    if (*train) runner.Train();
    if (*evaluate) runner.Evaluate();
    if (*score) runner.Score();
    if (*triage) runner.Triage();
    if (*synth) runner.Synth();
    if (*report) runner.Report();
    if (*pipeline) runner.Pipeline();
  } catch (const Error& e) {
    const int code = ExitCodeFor(e.kind());
    return ReportError(err, ErrorKindName(e.kind()), code, e.what());
  } catch (const fs::filesystem_error& e) {
    return ReportError(err, "io", kExitIo, e.what());
  } catch (const std::exception& e) {
    return ReportError(err, "internal", kExitInternal, e.what());
  }
  return kExitOk;
}

}  // namespace prtriage::cli
