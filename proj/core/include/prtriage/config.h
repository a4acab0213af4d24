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

#ifndef PRTRIAGE_CONFIG_H_
#define PRTRIAGE_CONFIG_H_

#include <filesystem>
#include <string_view>

#include "prtriage/agent_registry.h"
#include "prtriage/evaluate.h"
#include "prtriage/synth.h"
#include "prtriage/triage.h"

namespace prtriage {

// Everything a run can override from a JSON config file. Absent keys keep
// their defaults; unknown keys are rejected.
struct PipelineConfig {
  AgentRegistry registry = AgentRegistry::Default();
  FeatureConfig features;
  LabelConfig label;
  GbdtParams gbdt;
  TriagePolicy triage;
  SynthParams synth;
  // Split list, stage, seed and threads come from the command line.
  EvalOptions eval;
};

// Throws Error(kParse) on malformed JSON, wrong types or unknown keys, and
// Error(kInvalidArgument) when a section fails validation.
PipelineConfig ParseConfig(std::string_view json_text);
PipelineConfig LoadConfigFile(const std::filesystem::path& path);

}  // namespace prtriage

#endif  // PRTRIAGE_CONFIG_H_
