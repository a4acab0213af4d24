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

#include "prtriage/synth.h"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "prtriage/errors.h"
#include "prtriage/features.h"
#include "prtriage/labeling.h"
#include "prtriage/rng.h"

namespace prtriage {

namespace {

void CheckUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    ThrowInvalidArgument(fmt::format("{} must be in [0,1], got {}", name, v));
  }
}

void CheckPositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    ThrowInvalidArgument(fmt::format("{} must be > 0, got {}", name, v));
  }
}

struct Language {
  const char* name;
  const char* ext;
  double weight;
};

constexpr std::array<Language, 11> kLanguages{{
    {"Python", "py", 0.30},
    {"TypeScript", "ts", 0.25},
    {"JavaScript", "js", 0.10},
    {"Go", "go", 0.08},
    {"Rust", "rs", 0.05},
    {"Java", "java", 0.07},
    {"C++", "cpp", 0.04},
    {"C#", "cs", 0.03},
    {"Ruby", "rb", 0.03},
    {"PHP", "php", 0.03},
    {"Kotlin", "kt", 0.02},
}};

// None of these match a config, CI, docs, deps or lockfile rule.
constexpr std::array<const char*, 10> kSourceDirs{
    "src", "lib", "app", "pkg", "internal", "core", "server", "client",
    "utils", "api"};
constexpr std::array<const char*, 12> kStems{
    "handler", "parser",  "model",   "service", "router", "client",
    "cache",   "session", "metrics", "storage", "auth",   "scheduler"};
constexpr std::array<const char*, 8> kConfigFiles{
    "config/settings.yaml", "config/logging.conf",     "docker-compose.yml",
    "setup.cfg",           "pyproject.toml",           "Dockerfile",
    ".eslintrc.yml",       "conf/app.ini"};
constexpr std::array<const char*, 3> kCiOnlyFiles{
    ".github/workflows/ci.yml", "Jenkinsfile", ".github/workflows/release.yml"};
constexpr std::array<const char*, 3> kDocsFiles{"README.md", "docs/guide.md",
                                                "CHANGELOG.md"};
constexpr std::array<const char*, 4> kDepsFiles{"package.json", "go.mod",
                                                "pom.xml", "build.gradle"};
constexpr std::array<const char*, 4> kLockFiles{"package-lock.json", "yarn.lock",
                                                "go.sum", "poetry.lock"};
constexpr std::array<const char*, 8> kVerbs{"Fix",    "Add",     "Refactor",
                                            "Update", "Improve", "Remove",
                                            "Implement", "Handle"};
constexpr std::array<const char*, 10> kWords{
    "the",  "request", "error", "value",  "when",
    "user", "config",  "path",  "return", "update"};

template <typename T, std::size_t N>
const T& Pick(Rng& rng, const std::array<T, N>& items) {
  return items[static_cast<std::size_t>(rng.UniformInt(N))];
}

std::size_t PickWeighted(Rng& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.Uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

struct Repo {
  std::string id;
  std::size_t language;
};

std::vector<Repo> MakeRepos(const SynthParams& p) {
  const std::size_t n = p.n_repos > 0 ? p.n_repos
                                      : std::max<std::size_t>(2, p.n_prs / 40);
  Rng rng(DeriveSeed(p.seed, 0x7e905));
  std::vector<double> weights;
  for (const auto& l : kLanguages) weights.push_back(l.weight);
  std::vector<Repo> repos;
  for (std::size_t i = 0; i < n; ++i) {
    repos.push_back({fmt::format("org{}/project-{}", i % 23, i),
                     PickWeighted(rng, weights)});
  }
  return repos;
}

// Splits `total` into integer parts proportional to weights (largest
// remainder, ties to the lower index).
std::vector<std::int64_t> Apportion(std::int64_t total,
                                    std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> parts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    parts[i] = static_cast<std::int64_t>(std::floor(exact));
    used += parts[i];
    remainders.push_back({exact - static_cast<double>(parts[i]), i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) {
    ++parts[remainders[k % remainders.size()].second];
  }
  return parts;
}

std::string Sha(Rng& rng) { return fmt::format("{:016x}", rng.NextU64()); }

Timestamp AddSeconds(Timestamp t, double seconds) {
  return t + std::chrono::seconds(static_cast<std::int64_t>(std::llround(seconds)));
}

constexpr double kDay = 86400.0;

struct Draft {
  bool instant = false;
  bool touches_config = false;
  bool has_plan = false;
  double z = 0.0;  // standardized log size
};

// Files, title and body; returns the draft facts the effort model needs.
void FillContent(Rng& rng, const SynthParams& p, const Repo& repo,
                 PullRequestRecord& r, Draft& d) {
  const double median = d.instant ? p.instant_median_changes : p.normal_median_changes;
  d.z = rng.Normal();
  const auto total = std::max<std::int64_t>(
      1, std::llround(median * std::exp(p.size_sigma * d.z)));
  d.touches_config = rng.Bernoulli(d.instant ? p.instant_config_rate
                                             : p.normal_config_rate);
  d.has_plan = rng.Bernoulli(p.plan_rate);

  const char* ext = kLanguages[repo.language].ext;
  std::vector<std::string> paths;
  std::vector<double> weights;
  const auto n_src = 1 + rng.Poisson(0.6 * std::log1p(static_cast<double>(total) / 10.0));
  for (std::int64_t i = 0; i < n_src; ++i) {
    paths.push_back(fmt::format("{}/{}_{}.{}", Pick(rng, kSourceDirs),
                                Pick(rng, kStems), i, ext));
    weights.push_back(0.2 + rng.Exponential());
  }
  auto add = [&](std::string path, double scale) {
    if (std::find(paths.begin(), paths.end(), path) != paths.end()) return;
    paths.push_back(std::move(path));
    weights.push_back(scale * (0.2 + rng.Exponential()));
  };
  if (d.touches_config) add(Pick(rng, kConfigFiles), 0.3);
  if (rng.Bernoulli(p.ci_touch_rate)) add(Pick(rng, kCiOnlyFiles), 0.3);
  if (rng.Bernoulli(p.tests_touch_rate)) {
    add(fmt::format("tests/{}_test.{}", Pick(rng, kStems), ext), 0.8);
  }
  if (rng.Bernoulli(0.12)) add(Pick(rng, kDocsFiles), 0.3);
  if (rng.Bernoulli(0.05)) {
    add(Pick(rng, kDepsFiles), 0.1);
    if (rng.Bernoulli(0.5)) add(Pick(rng, kLockFiles), 0.5);
  }

  const double add_share = 0.55 + 0.4 * rng.Uniform();
  r.total_additions = std::llround(static_cast<double>(total) * add_share);
  r.total_deletions = total - r.total_additions;
  const auto adds = Apportion(r.total_additions, weights);
  const auto dels = Apportion(r.total_deletions, weights);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    r.files.push_back({paths[i], adds[i], dels[i]});
  }

  r.title = fmt::format("{} {} in {}", Pick(rng, kVerbs), Pick(rng, kStems),
                        Pick(rng, kSourceDirs));
  std::string body;
  const auto words = 5 + rng.Poisson(d.instant ? 15.0 : 40.0);
  for (std::int64_t i = 0; i < words; ++i) {
    if (i) body += ' ';
    body += Pick(rng, kWords);
  }
  body += '.';
  if (d.has_plan) {
    body += "\n\n## Plan\n1. Reproduce the issue\n2. Apply the change\n3. Add coverage\n";
  }
  r.linked_issue = rng.Bernoulli(p.linked_issue_rate);
  if (r.linked_issue) body += fmt::format("\n\nCloses #{}", 1 + rng.UniformInt(5000));
  r.body = std::move(body);
}

struct Outcome {
  double log_rate = 0.0;
  double agent_ghost_rate = 0.0;
};

// Timeline, commits and terminal state for a normal-regime PR.
void FillInteraction(Rng& rng, const SynthParams& p, const Draft& d,
                     const Outcome& o, PullRequestRecord& r) {
  const std::int64_t effort = rng.Poisson(std::exp(o.log_rate));
  const Timestamp created = r.created_at;

  Timestamp t = AddSeconds(created, 600.0 + rng.Exponential() * 0.25 * kDay);
  std::optional<Timestamp> last_human;
  for (std::int64_t i = 0; i < effort; ++i) {
    InteractionEvent e;
    e.kind = rng.Bernoulli(0.4) ? EventKind::kReview : EventKind::kComment;
    e.author_kind = rng.Bernoulli(p.bot_event_share) ? ActorKind::kBot
                                                     : ActorKind::kHuman;
    e.timestamp = t;
    r.timeline.push_back(e);
    if (e.author_kind == ActorKind::kHuman) last_human = t;
    // Occasional commit between rounds of review, before the next event.
    if (rng.Bernoulli(0.3)) {
      r.commits.push_back({AddSeconds(t, 60.0 + rng.Uniform() * 3000.0), Sha(rng)});
      t = AddSeconds(t, 3600.0);
    }
    t = AddSeconds(t, 60.0 + rng.Exponential() * 0.5 * kDay);
  }
  Timestamp last_activity = r.timeline.empty() ? created : r.timeline.back().timestamp;
  for (const auto& c : r.commits) last_activity = std::max(last_activity, c.timestamp);

  const double u = rng.Uniform();
  if (u < p.open_rate_non_instant) {
    r.state = PrState::kOpen;
    if (last_human && rng.Bernoulli(0.5)) {
      r.commits.push_back({AddSeconds(*last_human, 3600.0 + rng.Exponential() * kDay),
                           Sha(rng)});
    }
    return;
  }
  const bool merged = rng.Bernoulli(p.acceptance_rate_non_instant);
  if (!merged && last_human) {
    const double planned = p.plan_ghosting_ratio;
    const double norm = p.plan_rate * planned + (1.0 - p.plan_rate);
    const double ghost_p =
        std::clamp(o.agent_ghost_rate * (d.has_plan ? planned : 1.0) / norm, 0.0, 1.0);
    r.state = PrState::kRejected;
    if (rng.Bernoulli(ghost_p)) {
      // Nothing after the final feedback; a commit that landed after it
      // during the review loop is dropped.
      std::erase_if(r.commits, [&](const Commit& c) { return c.timestamp > *last_human; });
      r.closed_at = AddSeconds(*last_human, kDay * (1.0 + 44.0 * rng.Uniform()));
    } else {
      const Timestamp reply =
          AddSeconds(*last_human, 1800.0 + rng.Exponential() * 1.5 * kDay);
      r.commits.push_back({reply, Sha(rng)});
      r.closed_at = AddSeconds(std::max(reply, last_activity),
                               3600.0 + rng.Exponential() * 2.0 * kDay);
    }
    return;
  }
  const Timestamp end =
      AddSeconds(last_activity, 120.0 + rng.Exponential() * 1.0 * kDay);
  if (merged) {
    r.state = PrState::kMerged;
    r.merged_at = end;
  } else {
    r.state = PrState::kRejected;
  }
  r.closed_at = end;
}

void SortRecord(PullRequestRecord& r) {
  std::stable_sort(r.commits.begin(), r.commits.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  std::stable_sort(r.timeline.begin(), r.timeline.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
}

struct Generated {
  PullRequestRecord record;
  double expected_effort = 0.0;
};

Generated GenerateOne(const SynthParams& p, std::span<const Repo> repos,
                      std::span<const double> agent_weights, std::size_t index,
                      bool allow_instant,
                      const std::function<double(const Draft&, Rng&)>& log_rate) {
  Rng rng(DeriveSeed(p.seed, 0x9f1, index));
  Generated g;
  PullRequestRecord& r = g.record;
  const SynthAgent& agent = p.agents[PickWeighted(rng, agent_weights)];
  const Repo& repo = repos[static_cast<std::size_t>(rng.UniformInt(repos.size()))];
  r.repo_id = repo.id;
  r.agent_name = agent.name;
  r.author_kind = AuthorKind::kGenerativeAgent;
  r.primary_language = kLanguages[repo.language].name;
  r.created_at = AddSeconds(p.start, rng.Uniform() * p.span_days * kDay);

  Draft d;
  const double instant_p =
      agent.instant_fraction >= 0.0 ? agent.instant_fraction : p.instant_fraction;
  d.instant = allow_instant && rng.Bernoulli(instant_p);
  FillContent(rng, p, repo, r, d);

  const auto n_initial = 1 + rng.UniformInt(3);
  for (std::uint64_t i = 0; i < n_initial; ++i) {
    r.commits.push_back(
        {AddSeconds(r.created_at, -(60.0 + rng.Uniform() * 7200.0)), Sha(rng)});
  }

  if (d.instant) {
    r.state = PrState::kMerged;
    r.merged_at = AddSeconds(r.created_at, 1.0 + std::floor(rng.Uniform() * 58.0));
    r.closed_at = r.merged_at;
    r.ci_status = rng.Bernoulli(0.8) ? CiStatus::kPass : CiStatus::kNone;
  } else {
    const double u = rng.Uniform();
    r.ci_status = u < 0.6 ? CiStatus::kPass : u < 0.8 ? CiStatus::kFail : CiStatus::kNone;
    Outcome o;
    o.log_rate = log_rate(d, rng);
    o.agent_ghost_rate = agent.ghosting_rate;
    g.expected_effort = std::exp(o.log_rate);
    FillInteraction(rng, p, d, o, r);
  }
  SortRecord(r);
  return g;
}

std::vector<Generated> GenerateAll(
    const SynthParams& p, bool allow_instant,
    const std::function<double(const Draft&, Rng&)>& log_rate) {
  p.Validate();
  const auto repos = MakeRepos(p);
  std::vector<double> agent_weights;
  for (const auto& a : p.agents) agent_weights.push_back(a.weight);
  std::vector<Generated> out;
  out.reserve(p.n_prs);
  for (std::size_t i = 0; i < p.n_prs; ++i) {
    out.push_back(GenerateOne(p, repos, agent_weights, i, allow_instant, log_rate));
  }
  // PR numbers follow creation order within each repository.
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out[a].record.created_at < out[b].record.created_at;
  });
  std::map<std::string, std::size_t> counters;
  for (std::size_t i : order) {
    auto& r = out[i].record;
    r.id = fmt::format("{}#{}", r.repo_id, ++counters[r.repo_id]);
  }
  return out;
}

}  // namespace

void SynthParams::Validate() const {
  if (n_prs < 1) ThrowInvalidArgument("n_prs must be >= 1");
  CheckUnit(instant_fraction, "instant_fraction");
  CheckPositive(instant_median_changes, "instant_median_changes");
  CheckPositive(normal_median_changes, "normal_median_changes");
  CheckPositive(size_sigma, "size_sigma");
  CheckUnit(instant_config_rate, "instant_config_rate");
  CheckUnit(normal_config_rate, "normal_config_rate");
  CheckUnit(ci_touch_rate, "ci_touch_rate");
  CheckUnit(tests_touch_rate, "tests_touch_rate");
  if (!(effort_size_correlation >= 0.0 && effort_size_correlation < 0.75)) {
    ThrowInvalidArgument("effort_size_correlation must be in [0,0.75)");
  }
  CheckPositive(effort_noise, "effort_noise");
  CheckUnit(bot_event_share, "bot_event_share");
  if (agents.empty()) ThrowInvalidArgument("agents must not be empty");
  for (const auto& a : agents) {
    if (a.name.empty()) ThrowInvalidArgument("agent name must not be empty");
    CheckPositive(a.weight, "agent weight");
    CheckUnit(a.ghosting_rate, "agent ghosting_rate");
    if (a.instant_fraction >= 0.0) CheckUnit(a.instant_fraction, "agent instant_fraction");
  }
  CheckUnit(acceptance_rate_non_instant, "acceptance_rate_non_instant");
  CheckUnit(open_rate_non_instant, "open_rate_non_instant");
  CheckUnit(plan_rate, "plan_rate");
  CheckPositive(plan_ghosting_ratio, "plan_ghosting_ratio");
  CheckUnit(linked_issue_rate, "linked_issue_rate");
  if (span_days < 1) ThrowInvalidArgument("span_days must be >= 1");
  if (n_repos == 1) ThrowInvalidArgument("n_repos must be 0 or >= 2");
}

double EffortSizeCoefficient(const SynthParams& params) {
  // Poisson noise attenuates the rank correlation to about 0.78 of the
  // correlation between z and the log rate at these rates.
  const double latent = std::min(0.95, params.effort_size_correlation / 0.78);
  return params.effort_noise * latent / std::sqrt(1.0 - latent * latent);
}

std::vector<PullRequestRecord> GenerateCorpus(const SynthParams& params) {
  const double b = EffortSizeCoefficient(params);
  auto log_rate = [&](const Draft& d, Rng& rng) {
    return params.effort_intercept + b * d.z +
           params.effort_config_coef * d.touches_config +
           params.effort_no_plan_coef * !d.has_plan +
           params.effort_noise * rng.Normal();
  };
  auto all = GenerateAll(params, true, log_rate);
  std::vector<PullRequestRecord> out;
  out.reserve(all.size());
  for (auto& g : all) out.push_back(std::move(g.record));
  return out;
}

PlantedCorpus PlantedSignalCorpus(const SynthParams& params,
                                  double signal_strength,
                                  const PlantedCoefficients& c) {
  if (!(signal_strength >= 0.0) || !std::isfinite(signal_strength)) {
    ThrowInvalidArgument("signal_strength must be >= 0");
  }
  auto log_rate = [&](const Draft& d, Rng&) {
    return c.intercept +
           signal_strength * (c.size * d.z + c.config * d.touches_config +
                              c.no_plan * !d.has_plan);
  };
  auto all = GenerateAll(params, false, log_rate);
  PlantedCorpus out;
  std::vector<std::int64_t> effort;
  for (auto& g : all) {
    effort.push_back(EffortScore(g.record, EffortVariant::kAllEvents));
    out.expected_effort.push_back(g.expected_effort);
    out.records.push_back(std::move(g.record));
  }
  const std::int64_t t = HighCostThreshold(std::span<const std::int64_t>(effort), 0.8);
  for (auto e : effort) out.high_cost.push_back(e > t);
  return out;
}

}  // namespace prtriage
