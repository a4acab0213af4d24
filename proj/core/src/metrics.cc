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

#include "prtriage/metrics.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prtriage/errors.h"
#include "prtriage/parallel.h"
#include "prtriage/rng.h"

namespace prtriage {

namespace {

void CheckSizes(Scores scores, Labels labels) {
  if (scores.size() != labels.size()) {
    ThrowInvalidArgument(fmt::format("{} scores but {} labels", scores.size(),
                                     labels.size()));
  }
}

std::size_t CountPositives(Labels labels) {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
}

// Indices sorted by descending score, stable.
std::vector<std::size_t> DescendingOrder(Scores scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

double RocAuc(Scores scores, Labels labels) {
  CheckSizes(scores, labels);
  const std::size_t pos = CountPositives(labels);
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    ThrowInvalidArgument("ROC AUC needs both classes");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Twice the rank sum of positives stays integral under average ranks.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::uint64_t twice_avg = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] != 0) twice_rank_sum += twice_avg;
    }
    i = j + 1;
  }
  const std::uint64_t twice_u =
      twice_rank_sum - static_cast<std::uint64_t>(pos) * (pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double PrAuc(Scores scores, Labels labels) {
  CheckSizes(scores, labels);
  const std::size_t total_pos = CountPositives(labels);
  if (total_pos == 0) ThrowInvalidArgument("PR AUC needs a positive");
  const auto order = DescendingOrder(scores);
  double sum = 0.0;
  std::size_t before = 0;
  std::size_t pos_before = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::size_t m = j - i + 1;
    std::size_t q = 0;
    for (std::size_t k = i; k <= j; ++k) q += labels[order[k]] != 0;
    if (q > 0) {
      // Position t in the group holds a positive with probability q/m; the
      // expected number of group positives ahead of it is (t-1)(q-1)/(m-1).
      const double share = static_cast<double>(q) / static_cast<double>(m);
      for (std::size_t t = 1; t <= m; ++t) {
        const double ahead =
            m == 1 ? 0.0
                   : static_cast<double>(t - 1) * static_cast<double>(q - 1) /
                         static_cast<double>(m - 1);
        sum += share * (static_cast<double>(pos_before) + 1.0 + ahead) /
               static_cast<double>(before + t);
      }
    }
    before += m;
    pos_before += q;
    i = j + 1;
  }
  return sum / static_cast<double>(total_pos);
}

std::vector<std::size_t> RankByScore(Scores scores,
                                     std::span<const std::string> ids) {
  if (!ids.empty() && ids.size() != scores.size()) {
    ThrowInvalidArgument("ids and scores differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (!ids.empty() && ids[a] != ids[b]) return ids[a] < ids[b];
    return a < b;
  });
  return order;
}

std::size_t BudgetCount(std::size_t n, double budget) {
  if (!(budget > 0.0 && budget <= 1.0)) {
    ThrowInvalidArgument("budget must be in (0,1]");
  }
  const auto k = static_cast<std::size_t>(
      std::ceil(budget * static_cast<double>(n) - 1e-9));
  return std::min(k, n);
}

BudgetMetrics AtBudget(Scores scores, Labels labels, double budget,
                       std::span<const std::string> ids) {
  CheckSizes(scores, labels);
  BudgetMetrics out;
  out.selected = BudgetCount(scores.size(), budget);
  const std::size_t total_pos = CountPositives(labels);
  if (out.selected == 0) return out;
  const auto order = RankByScore(scores, ids);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < out.selected; ++i) hits += labels[order[i]] != 0;
  out.precision = static_cast<double>(hits) / static_cast<double>(out.selected);
  out.recall = total_pos == 0 ? 0.0
                              : static_cast<double>(hits) /
                                    static_cast<double>(total_pos);
  return out;
}

std::vector<Interval> BootstrapCiMulti(const std::vector<MetricFn>& metrics,
                                       Scores scores, Labels labels,
                                       int replicates, double alpha,
                                       std::uint64_t seed, int num_threads) {
  CheckSizes(scores, labels);
  if (replicates < 1) ThrowInvalidArgument("replicates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) ThrowInvalidArgument("alpha must be in (0,1)");
  const std::size_t n = scores.size();
  if (n == 0) ThrowInvalidArgument("bootstrap of empty sample");
  const std::size_t k = metrics.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // values[r*k + m]; NaN marks a skipped replicate.
  std::vector<double> values(static_cast<std::size_t>(replicates) * k, nan);

  ParallelFor(static_cast<std::size_t>(replicates), num_threads, [&](std::size_t r) {
    Rng rng(DeriveSeed(seed, r));
    std::vector<double> s(n);
    std::vector<std::uint8_t> l(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(rng.UniformInt(n));
      s[i] = scores[j];
      l[i] = labels[j];
      pos += l[i] != 0;
    }
    if (pos == 0 || pos == n) return;
    for (std::size_t m = 0; m < k; ++m) values[r * k + m] = metrics[m](s, l);
  });

  std::vector<Interval> out(k);
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<double> kept;
    kept.reserve(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
      const double v = values[static_cast<std::size_t>(r) * k + m];
      if (!std::isnan(v)) kept.push_back(v);
    }
    const std::size_t skipped = static_cast<std::size_t>(replicates) - kept.size();
    if (2 * skipped > static_cast<std::size_t>(replicates)) {
      throw Error(ErrorKind::kDegenerateData,
                  fmt::format("bootstrap skipped {} of {} single-class resamples",
                              skipped, replicates));
    }
    Interval iv;
    iv.point = metrics[m](scores, labels);
    iv.skipped = skipped;
    iv.low = NearestRankQuantile(kept, alpha / 2.0);
    iv.high = NearestRankQuantile(kept, 1.0 - alpha / 2.0);
    iv.low = std::min(iv.low, iv.point);
    iv.high = std::max(iv.high, iv.point);
    out[m] = iv;
  }
  return out;
}

Interval BootstrapCi(const MetricFn& metric, Scores scores, Labels labels,
                     int replicates, double alpha, std::uint64_t seed,
                     int num_threads) {
  return BootstrapCiMulti({metric}, scores, labels, replicates, alpha, seed,
                          num_threads)
      .front();
}

std::vector<CalibrationBin> CalibrationCurve(Scores probs, Labels labels,
                                             int n_bins) {
  CheckSizes(probs, labels);
  if (n_bins < 1) ThrowInvalidArgument("n_bins must be >= 1");
  std::vector<double> sum_pred(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<std::size_t> pos(static_cast<std::size_t>(n_bins), 0);
  std::vector<std::size_t> count(static_cast<std::size_t>(n_bins), 0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      ThrowInvalidArgument(fmt::format("probability {} outside [0,1]", p));
    }
    const auto b = std::min<std::size_t>(
        static_cast<std::size_t>(p * n_bins), static_cast<std::size_t>(n_bins - 1));
    sum_pred[b] += p;
    pos[b] += labels[i] != 0;
    ++count[b];
  }
  std::vector<CalibrationBin> out;
  for (std::size_t b = 0; b < count.size(); ++b) {
    if (count[b] == 0) continue;
    const double c = static_cast<double>(count[b]);
    out.push_back({(static_cast<double>(b) + 0.5) / n_bins, sum_pred[b] / c,
                   static_cast<double>(pos[b]) / c, count[b]});
  }
  return out;
}

std::vector<RocPoint> RocCurve(Scores scores, Labels labels) {
  CheckSizes(scores, labels);
  const std::size_t pos = CountPositives(labels);
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) ThrowInvalidArgument("ROC curve needs both classes");
  const auto order = DescendingOrder(scores);
  std::vector<RocPoint> out;
  out.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]] != 0) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    out.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                   static_cast<double>(tp) / static_cast<double>(pos), s});
  }
  return out;
}

std::vector<EcdfPoint> Ecdf(std::span<const double> values) {
  if (values.empty()) ThrowInvalidArgument("ECDF of empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<EcdfPoint> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.push_back({v[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double PearsonCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    ThrowInvalidArgument("correlation needs two equal-length samples, n >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double SpearmanCorrelation(std::span<const double> x,
                           std::span<const double> y) {
  const auto rx = AverageRanks(x);
  const auto ry = AverageRanks(y);
  return PearsonCorrelation(rx, ry);
}

double NearestRankQuantile(std::span<const double> values, double q) {
  if (values.empty()) ThrowInvalidArgument("quantile of empty sample");
  if (!(q > 0.0 && q <= 1.0)) ThrowInvalidArgument("quantile must be in (0,1]");
  auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   v.end());
  return v[rank - 1];
}

}  // namespace prtriage
