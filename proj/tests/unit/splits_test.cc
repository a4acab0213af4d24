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

#include <map>
#include <set>

#include "prtriage/errors.h"
#include "prtriage/rng.h"
#include "prtriage/splits.h"
#include "test_util.h"

namespace prtriage {
namespace {

using testing::At;
using testing::DerivedValues;
using testing::MakeRecord;

std::vector<PullRequestRecord> Corpus(size_t n, std::uint64_t seed, size_t repos = 5,
                                      size_t agents = 3) {
  Rng rng(seed);
  const std::vector<std::string> names{"Codex", "Claude", "Devin", "Copilot", "Other"};
  std::vector<PullRequestRecord> out;
  for (size_t i = 0; i < n; ++i) {
    PullRequestRecord r = MakeRecord("r" + std::to_string(rng.UniformInt(repos)) + "#" +
                                     std::to_string(i));
    r.repo_id = r.id.substr(0, r.id.find('#'));
    r.agent_name = names[rng.UniformInt(agents)];
    r.created_at = At(static_cast<double>(rng.UniformInt(30)));
    r.merged_at = r.created_at + std::chrono::hours(1);
    r.closed_at = r.merged_at;
    r.commits.clear();
    r.total_additions = static_cast<std::int64_t>(1 + rng.UniformInt(500));
    r.total_deletions = 0;
    r.files = {{"a.py", r.total_additions, 0}};
    out.push_back(r);
  }
  return out;
}

void ExpectPartition(const Split& s, size_t n) {
  std::vector<int> seen(n, 0);
  for (size_t i : s.train) ++seen.at(i);
  for (size_t i : s.test) ++seen.at(i);
  for (size_t i = 0; i < n; ++i) EXPECT_EQ(seen[i], 1) << s.name << " row " << i;
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
}

TEST(TemporalSplitTest, Examples) {
  std::vector<PullRequestRecord> recs;
  for (int i = 0; i < 10; ++i) {
    PullRequestRecord r = MakeRecord("x#" + std::to_string(i));
    r.created_at = At(9 - i);  // reverse input order
    r.merged_at = r.created_at + std::chrono::hours(1);
    r.closed_at = r.merged_at;
    r.commits.clear();
    recs.push_back(r);
  }
  Split s = TemporalSplit(recs, 0.8);
  EXPECT_EQ(s.train, (std::vector<size_t>{2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(s.test, (std::vector<size_t>{0, 1}));

  for (auto& r : recs) {
    r.created_at = At(0);
    r.merged_at = At(0, 60);
    r.closed_at = r.merged_at;
  }
  recs[3].id = "a#0";  // sorts first by id
  s = TemporalSplit(recs, 0.8);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test, (std::vector<size_t>{8, 9}));
  EXPECT_TRUE(std::count(s.train.begin(), s.train.end(), 3u));

  const std::vector<PullRequestRecord> three(recs.begin(), recs.begin() + 3);
  s = TemporalSplit(three, 0.5);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.test.size(), 2u);

  EXPECT_THROW(TemporalSplit(std::span<const PullRequestRecord>(recs).first(1), 0.8),
               Error);
}

TEST(TemporalSplitTest, TrainNeverAfterTest) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto recs = Corpus(200, seed);
    const Split s = TemporalSplit(recs, 0.8);
    ExpectPartition(s, recs.size());
    EXPECT_EQ(s.train.size(), 160u);
    Timestamp latest_train = At(-1000);
    for (size_t i : s.train) latest_train = std::max(latest_train, recs[i].created_at);
    for (size_t i : s.test) EXPECT_GE(recs[i].created_at, latest_train);
  }
}

TEST(RepoDisjointSplitTest, Examples) {
  std::vector<PullRequestRecord> recs;
  for (int i = 0; i < 10; ++i) {
    PullRequestRecord r = MakeRecord((i < 5 ? "a/x#" : "b/y#") + std::to_string(i));
    r.repo_id = i < 5 ? "a/x" : "b/y";
    recs.push_back(r);
  }
  const Split s = RepoDisjointSplit(recs, 0.5, 3);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.test.size(), 5u);
  const Split again = RepoDisjointSplit(recs, 0.5, 3);
  EXPECT_EQ(again.train, s.train);
  std::vector<PullRequestRecord> one(recs.begin(), recs.begin() + 5);
  try {
    RepoDisjointSplit(one, 0.5, 3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateData);
  }
}

TEST(RepoDisjointSplitTest, DisjointOnGeneratedCorpora) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto recs = Corpus(150, seed, 2 + seed % 9);
    const Split s = RepoDisjointSplit(recs, 0.8, seed);
    ExpectPartition(s, recs.size());
    std::set<std::string> train_repos;
    for (size_t i : s.train) train_repos.insert(recs[i].repo_id);
    for (size_t i : s.test) EXPECT_FALSE(train_repos.count(recs[i].repo_id));
    EXPECT_FALSE(s.test.empty());
    EXPECT_FALSE(s.train.empty());
  }
}

TEST(LoaoTest, Examples) {
  const auto recs = Corpus(300, 4, 5, 3);
  const auto folds = LeaveOneAgentOutFolds(recs);
  ASSERT_EQ(folds.size(), 3u);
  EXPECT_EQ(folds[0].name, "loao:Claude");
  size_t total_test = 0;
  for (const auto& f : folds) {
    ExpectPartition(f, recs.size());
    const std::string agent = f.name.substr(5);
    for (size_t i : f.test) EXPECT_EQ(recs[i].agent_name, agent);
    for (size_t i : f.train) EXPECT_NE(recs[i].agent_name, agent);
    total_test += f.test.size();
  }
  EXPECT_EQ(total_test, recs.size());
  EXPECT_THROW(LeaveOneAgentOutFolds(Corpus(20, 1, 3, 1)), Error);
}

TEST(RandomSplitTest, PartitionAndDeterminism) {
  const auto recs = Corpus(101, 2);
  const Split a = RandomSplit(recs, 0.8, 5);
  ExpectPartition(a, recs.size());
  EXPECT_EQ(a.train.size(), 80u);
  EXPECT_EQ(RandomSplit(recs, 0.8, 5).train, a.train);
}

TEST(SplitSpecTest, ParseAndValidate) {
  EXPECT_EQ(ParseSplitKind("repo"), SplitKind::kRepoDisjoint);
  EXPECT_EQ(ParseSplitKind("leave_one_agent_out"), SplitKind::kLeaveOneAgentOut);
  EXPECT_EQ(ToString(SplitKind::kLeaveOneAgentOut), "loao");
  EXPECT_THROW(ParseSplitKind("kfold"), Error);
  SplitSpec spec;
  spec.train_fraction = 1.0;
  EXPECT_THROW(spec.Validate(), Error);
  spec.train_fraction = 0.8;
  spec.kind = SplitKind::kLeaveOneAgentOut;
  EXPECT_EQ(MakeSplits(Corpus(50, 3, 4, 4), spec).size(), 4u);
}

TEST(StrataTest, UniformSizes) {
  std::vector<PullRequestRecord> recs;
  for (int i = 1; i <= 100; ++i) {
    PullRequestRecord r = MakeRecord("s#" + std::to_string(i));
    r.total_additions = i;
    r.total_deletions = 0;
    r.files = {{"a.py", i, 0}};
    recs.push_back(r);
  }
  const auto strata = SizeQuartileStrata(recs);
  ASSERT_EQ(strata.size(), 4u);
  const auto expected = DerivedValues()["strata_1_100"].get<std::vector<std::int64_t>>();
  for (int q = 0; q < 3; ++q) EXPECT_EQ(strata[q].upper, expected[q]);
  size_t total = 0;
  for (const auto& s : strata) {
    EXPECT_NEAR(static_cast<double>(s.rows.size()), 25.0, 1.0);
    total += s.rows.size();
  }
  EXPECT_EQ(total, 100u);
  EXPECT_EQ(strata[0].name, "q1");
}

TEST(StrataTest, DistinctSizesBalancedForAnyN) {
  for (int n = 4; n < 120; n += 7) {
    std::vector<PullRequestRecord> recs;
    for (int i = 0; i < n; ++i) {
      PullRequestRecord r = MakeRecord("s#" + std::to_string(i));
      r.total_additions = 3 * i + 1;
      r.total_deletions = 0;
      r.files = {{"a.py", r.total_additions, 0}};
      recs.push_back(r);
    }
    size_t total = 0;
    for (const auto& s : SizeQuartileStrata(recs)) {
      EXPECT_NEAR(static_cast<double>(s.rows.size()), n / 4.0, 1.0) << n;
      total += s.rows.size();
    }
    EXPECT_EQ(total, static_cast<size_t>(n));
  }
}

}  // namespace
}  // namespace prtriage
