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

#include "prtriage/splits.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "prtriage/errors.h"
#include "prtriage/rng.h"

namespace prtriage {

std::string_view ToString(SplitKind kind) {
  switch (kind) {
    case SplitKind::kTemporal:
      return "temporal";
    case SplitKind::kRepoDisjoint:
      return "repo_disjoint";
    case SplitKind::kLeaveOneAgentOut:
      return "loao";
    case SplitKind::kRandom:
      return "random";
  }
  return "?";
}

SplitKind ParseSplitKind(std::string_view s) {
  if (s == "temporal") return SplitKind::kTemporal;
  if (s == "repo" || s == "repo_disjoint") return SplitKind::kRepoDisjoint;
  if (s == "loao" || s == "leave_one_agent_out") {
    return SplitKind::kLeaveOneAgentOut;
  }
  if (s == "random") return SplitKind::kRandom;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown split '{}'", s));
}

void SplitSpec::Validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    ThrowInvalidArgument(
        fmt::format("train_fraction must be in (0,1), got {}", train_fraction));
  }
}

namespace {

void CheckFraction(double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    ThrowInvalidArgument(fmt::format("fraction must be in (0,1), got {}", fraction));
  }
}

void Finish(Split& split) {
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
}

}  // namespace

Split TemporalSplit(std::span<const PullRequestRecord> records,
                    double fraction) {
  CheckFraction(fraction);
  const std::size_t n = records.size();
  if (n < 2) {
    throw Error(ErrorKind::kDegenerateData, "temporal split needs at least 2 records");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].created_at != records[b].created_at) {
      return records[a].created_at < records[b].created_at;
    }
    if (records[a].id != records[b].id) return records[a].id < records[b].id;
    return a < b;
  });
  const auto cut = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (cut == 0 || cut == n) {
    throw Error(ErrorKind::kDegenerateData,
                fmt::format("temporal split of {} records at {} leaves a side empty",
                            n, fraction));
  }
  Split split;
  split.name = "temporal";
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  Finish(split);
  return split;
}

Split RepoDisjointSplit(std::span<const PullRequestRecord> records,
                        double fraction, std::uint64_t seed) {
  CheckFraction(fraction);
  std::map<std::string, std::vector<std::size_t>> by_repo;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_repo[records[i].repo_id].push_back(i);
  }
  if (by_repo.size() < 2) {
    throw Error(ErrorKind::kDegenerateData,
                "repo-disjoint split needs at least 2 repositories");
  }
  std::vector<const std::vector<std::size_t>*> repos;
  for (const auto& [name, rows] : by_repo) repos.push_back(&rows);
  Rng rng(DeriveSeed(seed, 0x5e90));
  rng.Shuffle(std::span(repos));

  const double target = fraction * static_cast<double>(records.size());
  Split split;
  split.name = "repo_disjoint";
  std::size_t r = 0;
  // Keep the last repository for test no matter what.
  while (r + 1 < repos.size() &&
         static_cast<double>(split.train.size()) < target) {
    split.train.insert(split.train.end(), repos[r]->begin(), repos[r]->end());
    ++r;
  }
  for (; r < repos.size(); ++r) {
    split.test.insert(split.test.end(), repos[r]->begin(), repos[r]->end());
  }
  Finish(split);
  return split;
}

std::vector<Split> LeaveOneAgentOutFolds(
    std::span<const PullRequestRecord> records) {
  std::map<std::string, std::vector<std::size_t>> by_agent;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_agent[records[i].agent_name].push_back(i);
  }
  if (by_agent.size() < 2) {
    throw Error(ErrorKind::kDegenerateData,
                "leave-one-agent-out needs at least 2 agents");
  }
  std::vector<Split> folds;
  for (const auto& [agent, rows] : by_agent) {
    Split fold;
    fold.name = "loao:" + agent;
    fold.test = rows;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].agent_name != agent) fold.train.push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

Split RandomSplit(std::span<const PullRequestRecord> records, double fraction,
                  std::uint64_t seed) {
  CheckFraction(fraction);
  const std::size_t n = records.size();
  if (n < 2) {
    throw Error(ErrorKind::kDegenerateData, "random split needs at least 2 records");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, 0x7a4d));
  rng.Shuffle(std::span(order));
  auto cut = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
  cut = std::clamp<std::size_t>(cut, 1, n - 1);
  Split split;
  split.name = "random";
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  Finish(split);
  return split;
}

std::vector<Split> MakeSplits(std::span<const PullRequestRecord> records,
                              const SplitSpec& spec) {
  spec.Validate();
  switch (spec.kind) {
    case SplitKind::kTemporal:
      return {TemporalSplit(records, spec.train_fraction)};
    case SplitKind::kRepoDisjoint:
      return {RepoDisjointSplit(records, spec.train_fraction, spec.seed)};
    case SplitKind::kLeaveOneAgentOut:
      return LeaveOneAgentOutFolds(records);
    case SplitKind::kRandom:
      return {RandomSplit(records, spec.train_fraction, spec.seed)};
  }
  ThrowInvalidArgument("unknown split kind");
}

std::vector<Stratum> SizeQuartileStrata(
    std::span<const PullRequestRecord> records,
    std::span<const std::size_t> rows) {
  if (rows.empty()) ThrowInvalidArgument("strata of empty set");
  std::vector<std::int64_t> sizes;
  sizes.reserve(rows.size());
  for (std::size_t r : rows) sizes.push_back(records[r].total_changes());
  std::sort(sizes.begin(), sizes.end());
  auto nearest_rank = [&](double q) {
    auto rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sizes.size()) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sizes.size());
    return sizes[rank - 1];
  };
  std::vector<Stratum> strata(4);
  strata[0].upper = nearest_rank(0.25);
  strata[1].upper = nearest_rank(0.50);
  strata[2].upper = nearest_rank(0.75);
  strata[3].upper = std::numeric_limits<std::int64_t>::max();
  for (int q = 0; q < 4; ++q) strata[q].name = fmt::format("q{}", q + 1);
  for (std::size_t r : rows) {
    const std::int64_t x = records[r].total_changes();
    int q = 0;
    while (q < 3 && x > strata[q].upper) ++q;
    strata[q].rows.push_back(r);
  }
  return strata;
}

std::vector<Stratum> SizeQuartileStrata(
    std::span<const PullRequestRecord> records) {
  std::vector<std::size_t> rows(records.size());
  std::iota(rows.begin(), rows.end(), 0);
  return SizeQuartileStrata(records, rows);
}

}  // namespace prtriage
