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

#include "prtriage/agent_registry.h"

#include <algorithm>
#include <cctype>

#include "prtriage/errors.h"

namespace prtriage {

namespace {

std::string NormalizeLogin(std::string_view login) {
  std::string s(login);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  constexpr std::string_view kBotSuffix = "[bot]";
  if (s.size() >= kBotSuffix.size() &&
      s.compare(s.size() - kBotSuffix.size(), kBotSuffix.size(),
                kBotSuffix) == 0) {
    s.resize(s.size() - kBotSuffix.size());
  }
  return s;
}

std::string Lower(std::string_view in) {
  std::string s(in);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

}  // namespace

AgentRegistry AgentRegistry::Default() {
  return AgentRegistry(
      {
          {"Codex", {"codex"}},
          {"Claude", {"claude"}},
          {"Devin", {"devin"}},
          {"Copilot", {"copilot"}},
      },
      {"dependabot", "renovate", "greenkeeper", "github-actions",
       "pre-commit-ci", "snyk"});
}

AgentRegistry::AgentRegistry(std::vector<AgentPattern> generative,
                             std::vector<std::string> deterministic)
    : generative_(std::move(generative)),
      deterministic_(std::move(deterministic)) {
  for (auto& pattern : generative_) {
    if (pattern.canonical_name.empty()) {
      ThrowInvalidArgument("agent pattern without canonical name");
    }
    for (auto& s : pattern.substrings) {
      s = Lower(s);
      if (s.empty()) ThrowInvalidArgument("empty generative pattern");
    }
  }
  for (auto& d : deterministic_) {
    d = Lower(d);
    if (d.empty()) ThrowInvalidArgument("empty denylist pattern");
  }
  for (const auto& pattern : generative_) {
    for (const auto& g : pattern.substrings) {
      for (const auto& d : deterministic_) {
        if (g.find(d) != std::string::npos ||
            d.find(g) != std::string::npos) {
          ThrowInvalidArgument("agent pattern '" + g +
                               "' overlaps denylist pattern '" + d + "'");
        }
      }
    }
  }
}

std::optional<std::string> AgentRegistry::MatchGenerative(
    std::string_view login) const {
  const std::string name = NormalizeLogin(login);
  for (const auto& pattern : generative_) {
    for (const auto& s : pattern.substrings) {
      if (name.find(s) != std::string::npos) return pattern.canonical_name;
    }
  }
  return std::nullopt;
}

bool AgentRegistry::MatchesDenylist(std::string_view login) const {
  const std::string name = NormalizeLogin(login);
  return std::any_of(deterministic_.begin(), deterministic_.end(),
                     [&](const std::string& d) {
                       return name.find(d) != std::string::npos;
                     });
}

AuthorKind ClassifyAuthor(std::string_view login,
                          std::string_view forge_type_flag,
                          const AgentRegistry& registry) {
  if (registry.MatchesDenylist(login)) return AuthorKind::kDeterministicBot;
  if (forge_type_flag == "Bot" && registry.MatchGenerative(login)) {
    return AuthorKind::kGenerativeAgent;
  }
  return AuthorKind::kHuman;
}

std::string CanonicalAgentName(std::string_view login,
                               const AgentRegistry& registry) {
  if (auto name = registry.MatchGenerative(login)) return *name;
  return std::string(login);
}

}  // namespace prtriage
