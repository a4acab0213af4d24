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

#ifndef PRTRIAGE_SYNTH_H_
#define PRTRIAGE_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prtriage/timeutil.h"
#include "prtriage/types.h"

namespace prtriage {

struct SynthAgent {
  std::string name;
  double weight = 1.0;          // relative share of PRs
  double ghosting_rate = 0.0;   // among rejected PRs with human feedback
  double instant_fraction = -1.0;  // < 0 uses the pooled fraction
};

struct SynthParams {
  std::size_t n_prs = 10000;
  std::uint64_t seed = 0;

  double instant_fraction = 0.283;
  double instant_median_changes = 68.0;
  double normal_median_changes = 104.0;
  double size_sigma = 1.0;
  double instant_config_rate = 0.071;
  double normal_config_rate = 0.184;
  double ci_touch_rate = 0.05;
  double tests_touch_rate = 0.30;

  // Effort on the normal regime: Poisson with log rate
  // effort_intercept + b * z + terms below + N(0, effort_noise), where z is
  // the standardized log size and b is solved from the target rank
  // correlation between total changes and effort.
  double effort_size_correlation = 0.6;
  double effort_intercept = 1.2;
  double effort_noise = 0.5;
  double effort_config_coef = 0.3;
  double effort_no_plan_coef = 0.2;
  double bot_event_share = 0.04;

  std::vector<SynthAgent> agents{{"Codex", 21799, 0.100},
                                 {"Claude", 523, 0.031},
                                 {"Devin", 4827, 0.009},
                                 {"Copilot", 5017, 0.023}};
  double acceptance_rate_non_instant = 0.687;
  double open_rate_non_instant = 0.05;
  double plan_rate = 0.35;
  // Ghosting odds for planned PRs relative to unplanned ones; the per-agent
  // mean rate is preserved.
  double plan_ghosting_ratio = 0.4;
  double linked_issue_rate = 0.3;

  std::size_t n_repos = 0;  // 0 picks max(2, n_prs / 40)
  Timestamp start = FromUnixSeconds(1735689600);  // 2025-01-01
  int span_days = 180;

  // Throws Error(kInvalidArgument) naming the bad field.
  void Validate() const;
};

std::vector<PullRequestRecord> GenerateCorpus(const SynthParams& params);

// Size coefficient b used for the normal regime.
double EffortSizeCoefficient(const SynthParams& params);

struct PlantedCoefficients {
  double intercept = 1.0;
  double size = 1.0;
  double config = 1.0;
  double no_plan = 0.8;
};

struct PlantedCorpus {
  std::vector<PullRequestRecord> records;
  // Latent expected effort of each PR.
  std::vector<double> expected_effort;
  // effort_score > nearest-rank 80th percentile over the whole corpus.
  std::vector<std::uint8_t> high_cost;
};

// Single-regime corpus (no instant merges) whose log effort rate is
//   intercept + strength * (size * z + config * touches_config
//                           + no_plan * !has_plan)
// so the ground-truth feature/label relationship is known. strength 0
// makes effort independent of every feature.
PlantedCorpus PlantedSignalCorpus(const SynthParams& params,
                                  double signal_strength,
                                  const PlantedCoefficients& coefficients = {});

}  // namespace prtriage

#endif  // PRTRIAGE_SYNTH_H_
