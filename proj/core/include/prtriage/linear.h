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

#ifndef PRTRIAGE_LINEAR_H_
#define PRTRIAGE_LINEAR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/types.h"

namespace prtriage {

struct LogisticOptions {
  // Ridge penalty on the weights (never on the intercept).
  double l2 = 1e-3;
  double tolerance = 1e-8;
  int max_iterations = 100;
};

struct LinearModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double intercept = 0.0;
  int iterations = 0;

  double Margin(std::span<const double> row) const;
  double Predict(std::span<const double> row) const;
};

// Ridge-penalized logistic regression by Newton/IRLS with step halving.
// x is row-major with y.size() rows. Throws Error(kInvalidArgument) on a
// single-class target or non-finite input.
LinearModel TrainLogisticRegression(std::span<const double> x, std::size_t cols,
                                    std::span<const std::uint8_t> y,
                                    const LogisticOptions& options = {},
                                    std::vector<std::string> names = {});

// Univariate baseline on log1p(total_changes).
LinearModel TrainSizeOnly(std::span<const double> log_total_changes,
                          std::span<const std::uint8_t> y,
                          const LogisticOptions& options = {});

// Lowercased tokens of a path split on '/', '.', '-', '_'.
std::vector<std::string> TokenizePath(std::string_view path);

struct PathTokenOptions {
  int min_document_frequency = 5;
  // Most frequent tokens kept when the vocabulary would be larger.
  std::size_t max_vocabulary = 2000;
  LogisticOptions logistic{.l2 = 1.0};
};

// TF-IDF over file-path tokens with a vocabulary frozen at training time.
struct PathTokenModel {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<double> idf;
  LinearModel linear;

  // L2-normalized tf*idf vector; unseen tokens contribute nothing.
  std::vector<double> Vectorize(const PullRequestRecord& record) const;
  double Predict(const PullRequestRecord& record) const;
};

// Throws Error(kInvalidArgument) when no token reaches the minimum document
// frequency.
PathTokenModel TrainPathTokenBaseline(std::span<const PullRequestRecord> records,
                                      std::span<const std::uint8_t> y,
                                      const PathTokenOptions& options = {});

}  // namespace prtriage

#endif  // PRTRIAGE_LINEAR_H_
