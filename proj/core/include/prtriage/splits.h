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

#ifndef PRTRIAGE_SPLITS_H_
#define PRTRIAGE_SPLITS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/types.h"

namespace prtriage {

enum class SplitKind { kTemporal, kRepoDisjoint, kLeaveOneAgentOut, kRandom };

std::string_view ToString(SplitKind kind);
// Accepts "temporal", "repo" / "repo_disjoint", "loao" /
// "leave_one_agent_out", "random".
SplitKind ParseSplitKind(std::string_view s);

struct SplitSpec {
  SplitKind kind = SplitKind::kTemporal;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Index sets into the record list; each side sorted ascending.
struct Split {
  std::string name;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Ascending created_at, ties by id; first floor(fraction*n) train.
Split TemporalSplit(std::span<const PullRequestRecord> records,
                    double fraction);

// Whole repositories are shuffled by seed and moved into train until train
// holds at least fraction*n PRs. Test is never left empty.
Split RepoDisjointSplit(std::span<const PullRequestRecord> records,
                        double fraction, std::uint64_t seed);

// One fold per distinct agent_name, in name order.
std::vector<Split> LeaveOneAgentOutFolds(
    std::span<const PullRequestRecord> records);

Split RandomSplit(std::span<const PullRequestRecord> records, double fraction,
                  std::uint64_t seed);

std::vector<Split> MakeSplits(std::span<const PullRequestRecord> records,
                              const SplitSpec& spec);

struct Stratum {
  std::string name;  // q1..q4
  // Inclusive upper bound of total_changes; the last stratum is unbounded.
  std::int64_t upper = 0;
  std::vector<std::size_t> rows;
};

// Nearest-rank 25/50/75th percentile boundaries b1..b3 of total_changes;
// q1 is x <= b1, q2 is b1 < x <= b2, and so on.
std::vector<Stratum> SizeQuartileStrata(
    std::span<const PullRequestRecord> records);

// Same rule over an explicit subset of rows.
std::vector<Stratum> SizeQuartileStrata(
    std::span<const PullRequestRecord> records,
    std::span<const std::size_t> rows);

}  // namespace prtriage

#endif  // PRTRIAGE_SPLITS_H_
