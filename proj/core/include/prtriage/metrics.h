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

#ifndef PRTRIAGE_METRICS_H_
#define PRTRIAGE_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace prtriage {

using Labels = std::span<const std::uint8_t>;
using Scores = std::span<const double>;

// Mann-Whitney statistic: probability that a random positive outscores a
// random negative, ties counted one half. Exact. Throws
// Error(kInvalidArgument) unless both classes are present.
double RocAuc(Scores scores, Labels labels);

// Average precision. Tied scores are resolved by averaging over every
// ordering of each tie group, so the value does not depend on input order.
// Throws Error(kInvalidArgument) without positives.
double PrAuc(Scores scores, Labels labels);

// Row order by descending score; ties by ascending id (or index when ids
// is empty).
std::vector<std::size_t> RankByScore(Scores scores,
                                     std::span<const std::string> ids = {});

// Size of the review set for a budget fraction: ceil(budget * n).
std::size_t BudgetCount(std::size_t n, double budget);

struct BudgetMetrics {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t selected = 0;
};

// Precision and recall of the top ceil(budget*n) rows. Recall is 0 when
// there are no positives. Throws unless budget is in (0,1].
BudgetMetrics AtBudget(Scores scores, Labels labels, double budget,
                       std::span<const std::string> ids = {});

struct Interval {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  std::size_t skipped = 0;
};

using MetricFn = std::function<double(Scores, Labels)>;

// Percentile bootstrap over row resamples with replacement. Single-class
// resamples are skipped and counted; more than half skipped throws
// Error(kDegenerateData). The interval is widened to contain the point
// estimate. Each replicate draws from its own derived stream, so the
// result is independent of num_threads.
Interval BootstrapCi(const MetricFn& metric, Scores scores, Labels labels,
                     int replicates = 1000, double alpha = 0.05,
                     std::uint64_t seed = 0, int num_threads = 1);

// Several metrics over one shared set of resamples.
std::vector<Interval> BootstrapCiMulti(const std::vector<MetricFn>& metrics,
                                       Scores scores, Labels labels,
                                       int replicates, double alpha,
                                       std::uint64_t seed, int num_threads = 1);

struct CalibrationBin {
  double bin_mid = 0.0;
  double mean_pred = 0.0;
  double frac_pos = 0.0;
  std::size_t count = 0;
};

// Equal-width bins on [0,1]; empty bins are omitted.
std::vector<CalibrationBin> CalibrationCurve(Scores probs, Labels labels,
                                             int n_bins = 10);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the origin
};

std::vector<RocPoint> RocCurve(Scores scores, Labels labels);

struct EcdfPoint {
  double x = 0.0;
  double cumulative = 0.0;
};

// Right-continuous step points, one per distinct value. Throws on empty
// input.
std::vector<EcdfPoint> Ecdf(std::span<const double> values);

// 1-based ranks, ties get the average rank.
std::vector<double> AverageRanks(std::span<const double> values);

double PearsonCorrelation(std::span<const double> x, std::span<const double> y);
double SpearmanCorrelation(std::span<const double> x,
                           std::span<const double> y);

// ceil(q*n)-th smallest value, q in (0,1].
double NearestRankQuantile(std::span<const double> values, double q);

}  // namespace prtriage

#endif  // PRTRIAGE_METRICS_H_
