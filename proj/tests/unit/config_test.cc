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

#include <filesystem>
#include <fstream>

#include "prtriage/config.h"
#include "prtriage/errors.h"

namespace prtriage {
namespace {

ErrorKind KindOf(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorKind::kInvalidArgument;
}

TEST(ConfigTest, EmptyObjectKeepsDefaults) {
  const PipelineConfig c = ParseConfig("{}");
  EXPECT_EQ(c.gbdt, GbdtParams{});
  EXPECT_EQ(c.triage.additions_flag_threshold, 500);
  EXPECT_EQ(c.label.ghosting_timeout_days, 14);
  EXPECT_EQ(c.synth.n_prs, 10000u);
  EXPECT_EQ(c.registry.generative().size(), 4u);
}

TEST(ConfigTest, OverridesEverySection) {
  const PipelineConfig c = ParseConfig(R"({
    "agents": {
      "generative": [{"name": "Jules", "patterns": ["jules"]}],
      "deterministic": ["mergify"],
      "vocabulary": ["Jules"]
    },
    "languages": ["Zig"],
    "path_patterns": {"docs_extensions": ["md", "org"]},
    "label": {"high_cost_quantile": 0.9, "ghosting_timeout_days": 7,
              "instant_window_seconds": 30, "effort_variant": "human_only",
              "feedback_anchor": "first"},
    "gbdt": {"n_trees": 12, "learning_rate": 0.2, "max_depth": 3},
    "triage": {"budget": 0.1, "require_plan": false},
    "eval": {"bootstrap_replicates": 50, "baselines": false},
    "synth": {"n_prs": 200, "start": "2024-06-01T00:00:00Z",
              "agents": [{"name": "Jules", "weight": 1, "ghosting_rate": 0.2}]}
  })");
  EXPECT_EQ(c.registry.generative()[0].canonical_name, "Jules");
  EXPECT_TRUE(c.registry.MatchesDenylist("mergify[bot]"));
  EXPECT_EQ(c.features.agents, std::vector<std::string>{"Jules"});
  EXPECT_EQ(c.features.languages, std::vector<std::string>{"Zig"});
  EXPECT_EQ(c.features.paths.docs_extensions, (std::vector<std::string>{"md", "org"}));
  EXPECT_EQ(c.label.high_cost_quantile, 0.9);
  EXPECT_EQ(c.label.instant_window, std::chrono::seconds(30));
  EXPECT_EQ(c.label.effort_variant, EffortVariant::kHumanOnly);
  EXPECT_EQ(c.label.feedback_anchor, FeedbackAnchor::kFirst);
  EXPECT_EQ(c.gbdt.n_trees, 12);
  EXPECT_EQ(c.triage.budget, 0.1);
  EXPECT_FALSE(c.triage.require_plan);
  EXPECT_EQ(c.eval.bootstrap_replicates, 50);
  EXPECT_FALSE(c.eval.baselines);
  EXPECT_EQ(c.synth.n_prs, 200u);
  EXPECT_EQ(c.synth.agents.size(), 1u);
  EXPECT_EQ(ToUnixSeconds(c.synth.start), 1717200000);
}

TEST(ConfigTest, Rejections) {
  EXPECT_EQ(KindOf("{"), ErrorKind::kParse);
  EXPECT_EQ(KindOf(R"({"unknown": 1})"), ErrorKind::kParse);
  EXPECT_EQ(KindOf(R"({"gbdt": {"n_tress": 1}})"), ErrorKind::kParse);
  EXPECT_EQ(KindOf(R"({"gbdt": {"n_trees": "many"}})"), ErrorKind::kParse);
  EXPECT_EQ(KindOf(R"({"gbdt": {"n_trees": 0}})"), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf(R"({"triage": {"budget": 2}})"), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf(R"({"agents": {"generative": [{"name": "X", "patterns": ["bot"]}],
                                 "deterministic": ["dependabot"]}})"),
            ErrorKind::kInvalidArgument);
}

TEST(ConfigTest, ExampleConfigParses) {
  const auto c = LoadConfigFile(std::string(PRTRIAGE_SOURCE_DIR) + "/config/example.json");
  EXPECT_EQ(c.triage.timeout_days, 14);
  EXPECT_THROW(LoadConfigFile("/nonexistent/x.json"), Error);
}

}  // namespace
}  // namespace prtriage
