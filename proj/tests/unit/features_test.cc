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

#include <cmath>
#include <set>
#include <sstream>

#include "prtriage/errors.h"
#include "prtriage/features.h"
#include "prtriage/rng.h"
#include "prtriage/synth.h"
#include "test_util.h"

namespace prtriage {
namespace {

using testing::At;
using testing::DerivedValues;
using testing::Event;
using testing::MakeRecord;

double Feature(const FeatureVector& v, const FeatureSchema& s, std::string_view name) {
  const auto idx = s.IndexOf(name);
  EXPECT_TRUE(idx.has_value()) << name;
  return v.values.at(*idx);
}

TEST(ChangeEntropyTest, Examples) {
  EXPECT_DOUBLE_EQ(ChangeEntropy(std::vector<FileChange>{{"a", 10, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(ChangeEntropy(std::vector<FileChange>{{"a", 5, 5}, {"b", 10, 0}}), 1.0);
  EXPECT_NEAR(ChangeEntropy(std::vector<FileChange>{{"a", 10, 0}, {"b", 20, 0}, {"c", 70, 0}}),
              DerivedValues()["change_entropy_10_20_70"].get<double>(), 1e-12);
  EXPECT_DOUBLE_EQ(ChangeEntropy({}), 0.0);
  EXPECT_DOUBLE_EQ(ChangeEntropy(std::vector<FileChange>{{"a", 0, 0}, {"b", 0, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(ChangeEntropy(std::vector<FileChange>{{"a", 0, 0}, {"b", 3, 1}}), 0.0);
}

TEST(ChangeEntropyTest, BoundedByLogOfFileCount) {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FileChange> files;
    const int n = 1 + static_cast<int>(rng.UniformInt(30));
    int positive = 0;
    for (int i = 0; i < n; ++i) {
      const auto a = static_cast<std::int64_t>(rng.UniformInt(50));
      const auto d = static_cast<std::int64_t>(rng.UniformInt(3) == 0 ? rng.UniformInt(20) : 0);
      positive += (a + d) > 0;
      files.push_back({"f" + std::to_string(i), a, d});
    }
    const double h = ChangeEntropy(files);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(std::max(1, positive)) + 1e-12);
    const double share = MaxFileShare(files);
    EXPECT_GE(share, 0.0);
    EXPECT_LE(share, 1.0);
  }
}

TEST(DetectPlanTest, Examples) {
  EXPECT_TRUE(DetectPlan("Plan:\n1. refactor\n2. test"));
  EXPECT_FALSE(DetectPlan(""));
  EXPECT_FALSE(DetectPlan("explains the plan informally mid-sentence"));
  EXPECT_TRUE(DetectPlan("Summary\n\n## Plan\n- a"));
  EXPECT_TRUE(DetectPlan("intro\n**Steps:** do it"));
  EXPECT_FALSE(DetectPlan("we have no plan: really"));
}

TEST(FileTypeFlagsTest, Examples) {
  EXPECT_EQ(ComputeFileTypeFlags(std::vector<FileChange>{{"src/lib.rs", 1, 0}}),
            FileTypeFlags{});
  const auto f = ComputeFileTypeFlags(std::vector<FileChange>{
      {"tests/test_api.py", 1, 0}, {".github/workflows/ci.yml", 1, 0}});
  EXPECT_TRUE(f.touches_tests);
  EXPECT_TRUE(f.touches_ci);
  EXPECT_FALSE(f.touches_config);  // yml under a CI path is CI only
  const auto lock = ComputeFileTypeFlags(std::vector<FileChange>{{"package-lock.json", 1, 0}});
  EXPECT_TRUE(lock.touches_lockfile);
  EXPECT_TRUE(lock.touches_deps);
  EXPECT_FALSE(lock.touches_config);
}

TEST(FileTypeFlagsTest, PatternTableDetails) {
  auto flags = [](const char* path) {
    return ComputeFileTypeFlags(std::vector<FileChange>{{path, 1, 0}});
  };
  EXPECT_TRUE(flags("pkg/server_test.go").touches_tests);
  EXPECT_TRUE(flags("web/App.spec.ts").touches_tests);
  EXPECT_TRUE(flags("src/__tests__/x.js").touches_tests);
  EXPECT_FALSE(flags("src/contest.py").touches_tests);
  EXPECT_TRUE(flags("Jenkinsfile").touches_ci);
  EXPECT_TRUE(flags("config/app.YAML").touches_config);
  EXPECT_TRUE(flags("deploy/Dockerfile").touches_config);
  EXPECT_TRUE(flags("requirements-dev.txt").touches_deps);
  EXPECT_TRUE(flags("docs/guide.html").touches_docs);
  EXPECT_TRUE(flags("README.md").touches_docs);
  EXPECT_TRUE(flags("Cargo.lock").touches_lockfile);
  EXPECT_TRUE(flags("pyproject.toml").touches_deps);
  EXPECT_TRUE(flags("pyproject.toml").touches_config);
}

TEST(SchemaTest, NamesUniqueAndStagesNested) {
  const auto t0 = FeatureSchema::Build(FeatureStage::kT0);
  const auto t1 = FeatureSchema::Build(FeatureStage::kT1);
  EXPECT_EQ(t0.size(), 35u);
  EXPECT_EQ(t1.size(), 39u);
  const auto names = t1.names();
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  for (size_t i = 0; i < t0.size(); ++i) EXPECT_EQ(t0.names()[i], names[i]);
  EXPECT_NE(t0.hash(), t1.hash());
  EXPECT_EQ(t0.hash().size(), 16u);
  EXPECT_EQ(t0.hash(), FeatureSchema::Build(FeatureStage::kT0).hash());
  FeatureConfig changed;
  changed.paths.docs_extensions.push_back("org");
  EXPECT_NE(FeatureSchema::Build(FeatureStage::kT0, changed).hash(), t0.hash());
}

TEST(ExtractT0Test, Examples) {
  const auto schema = FeatureSchema::Build(FeatureStage::kT0);
  PullRequestRecord r = MakeRecord();
  r.body = "";
  r.files = {{"src/a.py", 60, 4}, {"src/b.py", 40, 0}};
  r.total_additions = 100;
  r.total_deletions = 4;
  const auto v = ExtractT0(r, schema);
  ASSERT_EQ(v.values.size(), schema.size());
  EXPECT_EQ(v.schema_hash, schema.hash());
  EXPECT_EQ(Feature(v, schema, "body_length"), 0.0);
  EXPECT_EQ(Feature(v, schema, "has_plan"), 0.0);
  EXPECT_EQ(Feature(v, schema, "total_changes"), 104.0);
  EXPECT_NEAR(Feature(v, schema, "log1p_total_changes"),
              DerivedValues()["log1p_104"].get<double>(), 1e-12);
  EXPECT_EQ(Feature(v, schema, "agent_codex"), 1.0);
  EXPECT_EQ(Feature(v, schema, "agent_claude"), 0.0);
  EXPECT_EQ(Feature(v, schema, "agent_other"), 0.0);
  EXPECT_EQ(Feature(v, schema, "lang_python"), 1.0);
  EXPECT_EQ(Feature(v, schema, "changed_files"), 2.0);
  EXPECT_EQ(Feature(v, schema, "title_length"), 10.0);
}

TEST(ExtractT0Test, UnknownAgentAndUnicodeLengths) {
  const auto schema = FeatureSchema::Build(FeatureStage::kT0);
  PullRequestRecord r = MakeRecord();
  r.agent_name = "SomethingNew";
  r.primary_language = "";
  r.title = "héllo ✓";
  const auto v = ExtractT0(r, schema);
  EXPECT_EQ(Feature(v, schema, "agent_other"), 1.0);
  EXPECT_EQ(Feature(v, schema, "lang_other"), 1.0);
  EXPECT_EQ(Feature(v, schema, "title_length"), 7.0);
}

TEST(ExtractT0Test, TruncatedFilesEncodeUnknown) {
  const auto schema = FeatureSchema::Build(FeatureStage::kT0);
  PullRequestRecord r = MakeRecord();
  r.files.clear();
  r.files_truncated = true;
  const auto v = ExtractT0(r, schema);
  EXPECT_EQ(Feature(v, schema, "changed_files"), -1.0);
  EXPECT_EQ(Feature(v, schema, "touches_tests"), -1.0);
  EXPECT_EQ(Feature(v, schema, "total_changes"), 10.0);
}

TEST(ExtractT0Test, WrongStageIsSchemaError) {
  try {
    ExtractT0(MakeRecord(), FeatureSchema::Build(FeatureStage::kT1));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchemaMismatch);
  }
}

// Post-creation fields must not move any T0 value.
TEST(ExtractT0Test, LeakageMutationLeavesVectorUnchanged) {
  const auto schema = FeatureSchema::Build(FeatureStage::kT0);
  SynthParams params;
  params.n_prs = 200;
  params.seed = 5;
  const auto records = GenerateCorpus(params);
  Rng rng(17);
  for (const auto& original : records) {
    const auto before = ExtractT0(original, schema).values;
    PullRequestRecord m = original;
    m.state = PrState::kRejected;
    m.merged_at.reset();
    m.closed_at = m.created_at + std::chrono::hours(1 + rng.UniformInt(1000));
    m.timeline.clear();
    for (int i = 0; i < 5; ++i) {
      m.timeline.push_back(Event(rng.Bernoulli(0.5) ? EventKind::kReview : EventKind::kComment,
                                 rng.Bernoulli(0.5) ? ActorKind::kBot : ActorKind::kHuman,
                                 m.created_at + std::chrono::minutes(i)));
    }
    m.commits.push_back({m.created_at + std::chrono::hours(2000), "late"});
    m.ci_status = rng.Bernoulli(0.5) ? CiStatus::kFail : CiStatus::kPass;
    EXPECT_EQ(ExtractT0(m, schema).values, before) << original.id;
  }
}

TEST(ExtractT1Test, Examples) {
  const auto schema = FeatureSchema::Build(FeatureStage::kT1);
  PullRequestRecord r = MakeRecord();
  r.ci_status = CiStatus::kPass;
  auto v = ExtractT1(r, schema);
  EXPECT_EQ(Feature(v, schema, "ci_pass"), 1.0);
  EXPECT_EQ(Feature(v, schema, "ci_none"), 0.0);
  EXPECT_EQ(Feature(v, schema, "bot_comments_pre_review"), 0.0);

  r.timeline = {Event(EventKind::kComment, ActorKind::kBot, At(1)),
                Event(EventKind::kComment, ActorKind::kBot, At(2)),
                Event(EventKind::kReview, ActorKind::kHuman, At(3))};
  v = ExtractT1(r, schema);
  EXPECT_EQ(Feature(v, schema, "bot_comments_pre_review"), 2.0);

  r.timeline = {Event(EventKind::kComment, ActorKind::kHuman, At(1)),
                Event(EventKind::kComment, ActorKind::kBot, At(2))};
  v = ExtractT1(r, schema);
  EXPECT_EQ(Feature(v, schema, "bot_comments_pre_review"), 0.0);

  // The T0 prefix is shared.
  const auto t0 = ExtractT0(r, FeatureSchema::Build(FeatureStage::kT0)).values;
  EXPECT_TRUE(std::equal(t0.begin(), t0.end(), v.values.begin()));
}

TEST(FeatureMatrixTest, CsvRoundTripAndThreadInvariance) {
  SynthParams params;
  params.n_prs = 300;
  params.seed = 8;
  const auto records = GenerateCorpus(params);
  const auto schema = FeatureSchema::Build(FeatureStage::kT1);
  const FeatureMatrix m1 = BuildFeatureMatrix(records, schema, 1);
  const FeatureMatrix m8 = BuildFeatureMatrix(records, schema, 8);
  EXPECT_EQ(m1.values, m8.values);
  std::stringstream ss;
  WriteFeatureCsv(ss, m1, {{"seed", "8"}});
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# schema_hash=" + schema.hash(), 0), 0u);
  const FeatureMatrix back = ReadFeatureCsv(ss);
  EXPECT_EQ(back.schema_hash, m1.schema_hash);
  EXPECT_EQ(back.feature_names, m1.feature_names);
  EXPECT_EQ(back.ids, m1.ids);
  ASSERT_EQ(back.values.size(), m1.values.size());
  for (size_t i = 0; i < back.values.size(); ++i) {
    EXPECT_NEAR(back.values[i], m1.values[i], 1e-8 * std::max(1.0, std::abs(m1.values[i])));
  }
  const std::vector<size_t> rows{2, 0};
  const FeatureMatrix sub = m1.SelectRows(rows);
  EXPECT_EQ(sub.ids, (std::vector<std::string>{m1.ids[2], m1.ids[0]}));
  EXPECT_EQ(sub.at(1, 3), m1.at(0, 3));
}

}  // namespace
}  // namespace prtriage
