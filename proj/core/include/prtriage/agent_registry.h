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

#ifndef PRTRIAGE_AGENT_REGISTRY_H_
#define PRTRIAGE_AGENT_REGISTRY_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/types.h"

namespace prtriage {

struct AgentPattern {
  std::string canonical_name;
  // Case-insensitive substrings matched against the login with any
  // trailing "[bot]" removed.
  std::vector<std::string> substrings;
};

// Name patterns that separate generative coding agents from deterministic
// maintenance bots.
class AgentRegistry {
 public:
  // Codex, Claude, Devin, Copilot versus common dependency/CI bots.
  static AgentRegistry Default();

  // Throws Error(kInvalidArgument) when a generative substring and a
  // denylist substring overlap (one contains the other), since a login equal
  // to the longer one would then match both lists.
  AgentRegistry(std::vector<AgentPattern> generative,
                std::vector<std::string> deterministic);

  // Canonical agent name for a login, if any generative pattern matches.
  std::optional<std::string> MatchGenerative(std::string_view login) const;
  bool MatchesDenylist(std::string_view login) const;

  const std::vector<AgentPattern>& generative() const { return generative_; }
  const std::vector<std::string>& deterministic() const {
    return deterministic_;
  }

 private:
  std::vector<AgentPattern> generative_;
  std::vector<std::string> deterministic_;
};

// Denylist first: a denylisted login is a deterministic bot whatever the
// forge flag says. Otherwise generative iff the forge flags the account as
// "Bot" and a generative pattern matches. Everything else is human.
AuthorKind ClassifyAuthor(std::string_view login,
                          std::string_view forge_type_flag,
                          const AgentRegistry& registry);

// Canonical agent name when the login matches, else the login unchanged.
std::string CanonicalAgentName(std::string_view login,
                               const AgentRegistry& registry);

}  // namespace prtriage

#endif  // PRTRIAGE_AGENT_REGISTRY_H_
