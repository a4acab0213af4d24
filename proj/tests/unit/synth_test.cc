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
#include <map>

#include "prtriage/analysis.h"
#include "prtriage/corpus.h"
#include "prtriage/errors.h"
#include "prtriage/labeling.h"
#include "prtriage/metrics.h"
#include "prtriage/synth.h"

namespace prtriage {
namespace {

double BinomialSlack(double p, size_t n) {
  return 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
}

class SynthDefaultsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthParams p;
    p.n_prs = 10000;
    p.seed = 7;
    records_ = new std::vector<PullRequestRecord>(GenerateCorpus(p));
  }
  static void TearDownTestSuite() { delete records_; }
  static std::vector<PullRequestRecord>* records_;
};

std::vector<PullRequestRecord>* SynthDefaultsTest::records_ = nullptr;

TEST_F(SynthDefaultsTest, AllRecordsValid) {
  ASSERT_EQ(records_->size(), 10000u);
  for (const auto& r : *records_) EXPECT_TRUE(ValidateRecord(r).empty()) << r.id;
}

TEST_F(SynthDefaultsTest, RegimeRatesMatchTargets) {
  const auto regimes = ComputeRegimeStats(*records_, LabelConfig{});
  ASSERT_EQ(regimes.size(), 2u);
  const auto& instant = regimes[0];
  const auto& normal = regimes[1];
  EXPECT_EQ(instant.regime, "instant");
  const double frac = static_cast<double>(instant.count) / records_->size();
  EXPECT_NEAR(frac, 0.283, 0.01);
  EXPECT_NEAR(frac, 0.283, BinomialSlack(0.283, records_->size()));
  EXPECT_GE(instant.median_total_changes, 61);
  EXPECT_LE(instant.median_total_changes, 75);
  EXPECT_GE(normal.median_total_changes, 94);
  EXPECT_LE(normal.median_total_changes, 115);
  EXPECT_NEAR(instant.config_rate, 0.071, 0.01);
  EXPECT_NEAR(normal.config_rate, 0.184, 0.01);
  EXPECT_NEAR(normal.config_rate, 0.184, BinomialSlack(0.184, normal.count));
  EXPECT_NEAR(normal.acceptance_rate, 0.687,
              BinomialSlack(0.687, static_cast<size_t>(normal.count * 0.95)));
  EXPECT_EQ(instant.acceptance_rate, 1.0);
}

TEST_F(SynthDefaultsTest, NormalRegimeSizeEffortSpearman) {
  std::vector<double> size;
  std::vector<double> effort;
  for (const auto& r : *records_) {
    if (IsInstantMerge(r, std::chrono::seconds(60))) {
      EXPECT_TRUE(r.timeline.empty());
      continue;
    }
    size.push_back(static_cast<double>(r.total_changes()));
    effort.push_back(static_cast<double>(EffortScore(r, EffortVariant::kAllEvents)));
  }
  const double rho = SpearmanCorrelation(size, effort);
  EXPECT_GE(rho, 0.5);
  EXPECT_LE(rho, 0.7);
}

TEST_F(SynthDefaultsTest, AgentGhostingFollowsMix) {
  const auto stats = ComputeAgentStats(*records_, LabelConfig{});
  std::map<std::string, AgentStats> by;
  for (const auto& s : stats) by[s.agent] = s;
  ASSERT_TRUE(by.count("Codex"));
  ASSERT_TRUE(by.count("all"));
  EXPECT_EQ(by["all"].total, records_->size());
  const auto& codex = by["Codex"];
  EXPECT_NEAR(codex.ghosting_rate(), 0.100,
              BinomialSlack(0.1, codex.feedback_rejected) + 0.01);
  EXPECT_GT(codex.ghosting_rate(), by["Devin"].ghosting_rate());
}

TEST(SynthTest, DeterministicBytes) {
  SynthParams p;
  p.n_prs = 500;
  p.seed = 3;
  const auto a = GenerateCorpus(p);
  const auto b = GenerateCorpus(p);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(SerializeRecord(a[i]), SerializeRecord(b[i]));
  p.seed = 4;
  EXPECT_NE(SerializeRecord(GenerateCorpus(p)[0]), SerializeRecord(a[0]));
}

TEST(SynthTest, NoInstantRegime) {
  SynthParams p;
  p.n_prs = 2000;
  p.instant_fraction = 0;
  for (auto& a : p.agents) a.instant_fraction = -1;
  for (const auto& r : GenerateCorpus(p)) {
    EXPECT_FALSE(IsInstantMerge(r, std::chrono::seconds(60))) << r.id;
  }
}

TEST(SynthTest, PerAgentInstantOverride) {
  SynthParams p;
  p.n_prs = 4000;
  p.agents = {{"A", 1, 0.05, 0.9}, {"B", 1, 0.05, 0.0}};
  std::map<std::string, std::pair<int, int>> counts;
  for (const auto& r : GenerateCorpus(p)) {
    auto& c = counts[r.agent_name];
    ++c.second;
    c.first += IsInstantMerge(r, std::chrono::seconds(60));
  }
  EXPECT_NEAR(static_cast<double>(counts["A"].first) / counts["A"].second, 0.9, 0.03);
  EXPECT_EQ(counts["B"].first, 0);
}

TEST(SynthTest, InvalidParamsRejected) {
  for (auto mutate : std::vector<void (*)(SynthParams&)>{
           [](SynthParams& p) { p.instant_fraction = 1.2; },
           [](SynthParams& p) { p.normal_median_changes = 0; },
           [](SynthParams& p) { p.n_prs = 0; },
           [](SynthParams& p) { p.agents.clear(); },
           [](SynthParams& p) { p.effort_size_correlation = 1.0; },
           [](SynthParams& p) { p.agents[0].ghosting_rate = -0.1; }}) {
    SynthParams p;
    mutate(p);
    try {
      GenerateCorpus(p);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
    }
  }
}

TEST(SynthTest, PlantedCorpusShape) {
  SynthParams p;
  p.n_prs = 3000;
  p.seed = 2;
  const auto planted = PlantedSignalCorpus(p, 1.0);
  ASSERT_EQ(planted.records.size(), 3000u);
  ASSERT_EQ(planted.high_cost.size(), 3000u);
  ASSERT_EQ(planted.expected_effort.size(), 3000u);
  size_t positives = 0;
  for (size_t i = 0; i < planted.records.size(); ++i) {
    const auto& r = planted.records[i];
    EXPECT_TRUE(ValidateRecord(r).empty());
    EXPECT_FALSE(IsInstantMerge(r, std::chrono::seconds(60)));
    positives += planted.high_cost[i];
  }
  EXPECT_GT(positives, 300u);
  EXPECT_LE(positives, 650u);
  // Expected effort follows log size.
  std::vector<double> size;
  for (const auto& r : planted.records) size.push_back(std::log1p(r.total_changes()));
  EXPECT_GT(SpearmanCorrelation(size, planted.expected_effort), 0.6);
  const auto again = PlantedSignalCorpus(p, 1.0);
  EXPECT_EQ(SerializeRecord(again.records[17]), SerializeRecord(planted.records[17]));
}

TEST(SynthTest, ZeroStrengthDecouplesEffortFromSize) {
  SynthParams p;
  p.n_prs = 3000;
  const auto planted = PlantedSignalCorpus(p, 0.0);
  std::vector<double> size;
  for (const auto& r : planted.records) size.push_back(std::log1p(r.total_changes()));
  EXPECT_NEAR(SpearmanCorrelation(size, planted.expected_effort), 0.0, 0.06);
}

TEST(SynthTest, EffortCoefficientIncreasesWithTarget) {
  SynthParams p;
  const double b6 = EffortSizeCoefficient(p);
  p.effort_size_correlation = 0.3;
  EXPECT_LT(EffortSizeCoefficient(p), b6);
  EXPECT_GT(b6, 0);
}

}  // namespace
}  // namespace prtriage
