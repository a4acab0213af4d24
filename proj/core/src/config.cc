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

#include "prtriage/config.h"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "prtriage/errors.h"

namespace prtriage {

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail("expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw Error(ErrorKind::kParse,
                    fmt::format("config: unknown key {}.{}", path_, key));
      }
    }
  }

  const json* Find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    const json* v = Find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::kParse,
                  fmt::format("config: {}.{} has the wrong type", path_, key));
    }
  }

  std::string Path(const std::string& key) const { return path_ + "." + key; }

  [[noreturn]] void Fail(const std::string& msg) const {
    throw Error(ErrorKind::kParse, fmt::format("config: {}: {}", path_, msg));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void ReadAgents(Section& s, PipelineConfig& c) {
  std::vector<AgentPattern> generative = c.registry.generative();
  std::vector<std::string> deterministic = c.registry.deterministic();
  if (const json* g = s.Find("generative")) {
    if (!g->is_array()) s.Fail("generative must be an array");
    generative.clear();
    for (std::size_t i = 0; i < g->size(); ++i) {
      Section e((*g)[i], fmt::format("{}[{}]", s.Path("generative"), i));
      AgentPattern p;
      e.Read("name", p.canonical_name);
      e.Read("patterns", p.substrings);
      if (p.canonical_name.empty() || p.substrings.empty()) {
        e.Fail("name and patterns are required");
      }
      generative.push_back(std::move(p));
    }
  }
  s.Read("deterministic", deterministic);
  c.registry = AgentRegistry(std::move(generative), std::move(deterministic));
  s.Read("vocabulary", c.features.agents);
}

void ReadPaths(Section& s, PathPatternTable& t) {
  s.Read("test_segments", t.test_segments);
  s.Read("test_name_prefixes", t.test_name_prefixes);
  s.Read("test_stem_suffixes", t.test_stem_suffixes);
  s.Read("test_name_infixes", t.test_name_infixes);
  s.Read("ci_substrings", t.ci_substrings);
  s.Read("config_extensions", t.config_extensions);
  s.Read("config_filenames", t.config_filenames);
  s.Read("deps_filenames", t.deps_filenames);
  s.Read("docs_extensions", t.docs_extensions);
  s.Read("docs_segments", t.docs_segments);
  s.Read("lockfile_filenames", t.lockfile_filenames);
}

void ReadLabel(Section& s, LabelConfig& l) {
  s.Read("high_cost_quantile", l.high_cost_quantile);
  s.Read("ghosting_timeout_days", l.ghosting_timeout_days);
  std::int64_t window = l.instant_window.count();
  s.Read("instant_window_seconds", window);
  l.instant_window = std::chrono::seconds(window);
  std::string v;
  s.Read("effort_variant", v);
  if (!v.empty()) l.effort_variant = ParseEffortVariant(v);
  std::string a;
  s.Read("feedback_anchor", a);
  if (!a.empty()) l.feedback_anchor = ParseFeedbackAnchor(a);
  l.Validate();
}

void ReadGbdt(Section& s, GbdtParams& g) {
  s.Read("n_trees", g.n_trees);
  s.Read("learning_rate", g.learning_rate);
  s.Read("max_depth", g.max_depth);
  s.Read("min_samples_leaf", g.min_samples_leaf);
  s.Read("l2_leaf_penalty", g.l2_leaf_penalty);
  s.Read("n_histogram_bins", g.n_histogram_bins);
  s.Read("subsample_fraction", g.subsample_fraction);
  g.Validate();
}

void ReadTriage(Section& s, TriagePolicy& t) {
  s.Read("budget", t.budget);
  s.Read("additions_flag_threshold", t.additions_flag_threshold);
  s.Read("require_plan", t.require_plan);
  s.Read("timeout_days", t.timeout_days);
  s.Read("issue_link_exempt", t.issue_link_exempt);
  s.Read("fast_track_probability_cutoff", t.fast_track_probability_cutoff);
  t.Validate();
}

void ReadEval(Section& s, EvalOptions& e) {
  s.Read("train_fraction", e.train_fraction);
  s.Read("budget", e.budget);
  s.Read("bootstrap_replicates", e.bootstrap_replicates);
  s.Read("alpha", e.alpha);
  s.Read("importance_repeats", e.importance_repeats);
  s.Read("baselines", e.baselines);
  s.Read("importance", e.importance);
}

void ReadSynth(Section& s, SynthParams& p) {
  s.Read("n_prs", p.n_prs);
  s.Read("instant_fraction", p.instant_fraction);
  s.Read("instant_median_changes", p.instant_median_changes);
  s.Read("normal_median_changes", p.normal_median_changes);
  s.Read("size_sigma", p.size_sigma);
  s.Read("instant_config_rate", p.instant_config_rate);
  s.Read("normal_config_rate", p.normal_config_rate);
  s.Read("ci_touch_rate", p.ci_touch_rate);
  s.Read("tests_touch_rate", p.tests_touch_rate);
  s.Read("effort_size_correlation", p.effort_size_correlation);
  s.Read("effort_intercept", p.effort_intercept);
  s.Read("effort_noise", p.effort_noise);
  s.Read("effort_config_coef", p.effort_config_coef);
  s.Read("effort_no_plan_coef", p.effort_no_plan_coef);
  s.Read("bot_event_share", p.bot_event_share);
  s.Read("acceptance_rate_non_instant", p.acceptance_rate_non_instant);
  s.Read("open_rate_non_instant", p.open_rate_non_instant);
  s.Read("plan_rate", p.plan_rate);
  s.Read("plan_ghosting_ratio", p.plan_ghosting_ratio);
  s.Read("linked_issue_rate", p.linked_issue_rate);
  s.Read("n_repos", p.n_repos);
  s.Read("span_days", p.span_days);
  std::string start;
  s.Read("start", start);
  if (!start.empty()) p.start = ParseIso8601(start);
  if (const json* agents = s.Find("agents")) {
    if (!agents->is_array()) s.Fail("agents must be an array");
    p.agents.clear();
    for (std::size_t i = 0; i < agents->size(); ++i) {
      Section a((*agents)[i], fmt::format("{}[{}]", s.Path("agents"), i));
      SynthAgent agent;
      a.Read("name", agent.name);
      a.Read("weight", agent.weight);
      a.Read("ghosting_rate", agent.ghosting_rate);
      a.Read("instant_fraction", agent.instant_fraction);
      p.agents.push_back(std::move(agent));
    }
  }
  p.Validate();
}

}  // namespace

PipelineConfig ParseConfig(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, fmt::format("config: {}", e.what()));
  }
  PipelineConfig c;
  Section top(root, "$");
  if (const json* j = top.Find("agents")) {
    Section s(*j, "$.agents");
    ReadAgents(s, c);
  }
  top.Read("languages", c.features.languages);
  if (const json* j = top.Find("path_patterns")) {
    Section s(*j, "$.path_patterns");
    ReadPaths(s, c.features.paths);
  }
  if (const json* j = top.Find("label")) {
    Section s(*j, "$.label");
    ReadLabel(s, c.label);
  }
  if (const json* j = top.Find("gbdt")) {
    Section s(*j, "$.gbdt");
    ReadGbdt(s, c.gbdt);
  }
  if (const json* j = top.Find("triage")) {
    Section s(*j, "$.triage");
    ReadTriage(s, c.triage);
  }
  if (const json* j = top.Find("eval")) {
    Section s(*j, "$.eval");
    ReadEval(s, c.eval);
  }
  if (const json* j = top.Find("synth")) {
    Section s(*j, "$.synth");
    ReadSynth(s, c.synth);
  }
  c.eval.features = c.features;
  c.eval.labels = c.label;
  c.eval.gbdt = c.gbdt;
  return c;
}

PipelineConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

}  // namespace prtriage
