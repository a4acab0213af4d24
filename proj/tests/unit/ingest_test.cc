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

#include <sstream>

#include "prtriage/agent_registry.h"
#include "prtriage/corpus.h"
#include "prtriage/csv.h"
#include "prtriage/errors.h"
#include "prtriage/synth.h"
#include "test_util.h"

namespace prtriage {
namespace {

using testing::At;
using testing::MakeRecord;
using testing::MakeRejected;

TEST(AgentRegistryTest, ClassifiesExamples) {
  const AgentRegistry reg = AgentRegistry::Default();
  EXPECT_EQ(ClassifyAuthor("codex[bot]", "Bot", reg), AuthorKind::kGenerativeAgent);
  EXPECT_EQ(ClassifyAuthor("dependabot[bot]", "Bot", reg),
            AuthorKind::kDeterministicBot);
  EXPECT_EQ(ClassifyAuthor("alice", "User", reg), AuthorKind::kHuman);
}

TEST(AgentRegistryTest, GenerativeRequiresBotFlag) {
  const AgentRegistry reg = AgentRegistry::Default();
  EXPECT_EQ(ClassifyAuthor("claude-fan", "User", reg), AuthorKind::kHuman);
  EXPECT_EQ(ClassifyAuthor("Copilot", "Bot", reg), AuthorKind::kGenerativeAgent);
  EXPECT_EQ(ClassifyAuthor("renovate[bot]", "User", reg),
            AuthorKind::kDeterministicBot);
}

TEST(AgentRegistryTest, CanonicalNames) {
  const AgentRegistry reg = AgentRegistry::Default();
  EXPECT_EQ(CanonicalAgentName("devin-ai-integration[bot]", reg), "Devin");
  EXPECT_EQ(CanonicalAgentName("chatgpt-codex-connector[bot]", reg), "Codex");
  EXPECT_EQ(CanonicalAgentName("someone", reg), "someone");
}

TEST(AgentRegistryTest, EmptyDenylistNeverYieldsDeterministic) {
  const AgentRegistry reg({{"Codex", {"codex"}}}, {});
  for (const char* login : {"dependabot[bot]", "codex", "renovate", "x", ""}) {
    for (const char* flag : {"Bot", "User", "Organization"}) {
      EXPECT_NE(ClassifyAuthor(login, flag, reg), AuthorKind::kDeterministicBot);
    }
  }
}

TEST(AgentRegistryTest, OverlappingListsRejected) {
  try {
    AgentRegistry({{"X", {"bot"}}}, {"dependabot"});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

std::string ThreeLines() {
  std::string out;
  for (int i = 1; i <= 3; ++i) {
    out += SerializeRecord(MakeRecord("acme/widgets#" + std::to_string(i))) + "\n";
  }
  return out;
}

TEST(CorpusTest, ThreeValidLines) {
  std::istringstream in(ThreeLines());
  const auto parsed = ParseCorpus(in, false, AgentRegistry::Default());
  EXPECT_EQ(parsed.records.size(), 3u);
  EXPECT_TRUE(parsed.diagnostics.empty());
}

TEST(CorpusTest, TruncatedLineIsDiagnosedInLenientMode) {
  std::string text = ThreeLines();
  const size_t second = text.find('\n') + 1;
  const size_t third = text.find('\n', second) + 1;
  text = text.substr(0, second) + text.substr(second, (third - second) / 2) +
         "\n" + text.substr(third);
  std::istringstream in(text);
  const auto parsed = ParseCorpus(in, false, AgentRegistry::Default());
  EXPECT_EQ(parsed.records.size(), 2u);
  ASSERT_EQ(parsed.diagnostics.size(), 1u);
  EXPECT_EQ(parsed.diagnostics[0].line_number, 2u);

  std::istringstream strict_in(text);
  try {
    ParseCorpus(strict_in, true, AgentRegistry::Default());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(CorpusTest, EmptyStream) {
  std::istringstream in("");
  const auto parsed = ParseCorpus(in, true, AgentRegistry::Default());
  EXPECT_TRUE(parsed.records.empty());
  EXPECT_TRUE(parsed.diagnostics.empty());
}

TEST(CorpusTest, BlankLinesIgnored) {
  std::istringstream in("\n" + ThreeLines() + "\n\n");
  EXPECT_EQ(ParseCorpus(in, true, AgentRegistry::Default()).records.size(), 3u);
}

TEST(CorpusTest, MissingFieldIsParseError) {
  std::string line = SerializeRecord(MakeRecord());
  const size_t pos = line.find("\"primary_language\"");
  ASSERT_NE(pos, std::string::npos);
  line = line.substr(0, pos - 1) + "}";
  EXPECT_THROW(ParseRecordLine(line, AgentRegistry::Default()), Error);
}

TEST(CorpusTest, RawForgeAuthorTypeIsClassified) {
  PullRequestRecord r = MakeRecord();
  r.agent_name = "codex[bot]";
  std::string line = SerializeRecord(r);
  const std::string from = "\"generative_agent\"";
  line.replace(line.find(from), from.size(), "\"Bot\"");
  const auto parsed = ParseRecordLine(line, AgentRegistry::Default());
  EXPECT_EQ(parsed.author_kind, AuthorKind::kGenerativeAgent);
  EXPECT_EQ(parsed.agent_name, "Codex");
}

TEST(CorpusTest, UnreadableFileIsIoError) {
  try {
    ReadCorpusFile("/nonexistent/corpus.jsonl", false, AgentRegistry::Default());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(CorpusTest, RoundTripOverSyntheticCorpus) {
  SynthParams params;
  params.n_prs = 300;
  params.seed = 11;
  const auto records = GenerateCorpus(params);
  std::stringstream ss;
  WriteCorpus(ss, records);
  const auto parsed = ParseCorpus(ss, true, AgentRegistry::Default());
  ASSERT_EQ(parsed.records.size(), records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(parsed.records[i], records[i]) << records[i].id;
    EXPECT_EQ(SerializeRecord(parsed.records[i]), SerializeRecord(records[i]));
  }
}

TEST(CorpusTest, RoundTripPreservesUnicodeAndNulls) {
  PullRequestRecord r = MakeRejected();
  r.title = "Fix \"quoted\", comma\nand ünïcødé ✓";
  r.body = "Plan:\n1. a\n2. b";
  r.timeline = {testing::Event(EventKind::kReview, ActorKind::kBot, At(1)),
                testing::Event(EventKind::kComment, ActorKind::kHuman, At(2))};
  r.ci_status = CiStatus::kFail;
  r.linked_issue = true;
  const auto back = ParseRecordLine(SerializeRecord(r), AgentRegistry::Default());
  EXPECT_EQ(back, r);
}

TEST(CsvTest, EscapeAndSplit) {
  const std::vector<std::string> fields{"a", "b,c", "d\"e", ""};
  std::ostringstream out;
  WriteCsvRow(out, fields);
  std::string line = out.str();
  line.pop_back();
  EXPECT_EQ(SplitCsvLine(line), fields);
  EXPECT_EQ(FormatReal(0.1), "0.1");
  EXPECT_EQ(FormatReal(1.0 / 3.0), "0.333333333");
}

TEST(CsvTest, ReadsCommentsHeaderRows) {
  std::istringstream in("# seed=1\n# schema_hash=x\nid,v\nA,1\nB,2\n");
  const CsvTable t = ReadCsv(in);
  EXPECT_EQ(t.comments, (std::vector<std::string>{" seed=1", " schema_hash=x"}));
  EXPECT_EQ(t.Column("v"), 1u);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_THROW(t.Column("missing"), Error);
}

}  // namespace
}  // namespace prtriage
