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

#ifndef PRTRIAGE_GBDT_H_
#define PRTRIAGE_GBDT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prtriage/features.h"

namespace prtriage {

struct GbdtParams {
  int n_trees = 200;
  double learning_rate = 0.05;
  int max_depth = 6;
  int min_samples_leaf = 20;
  double l2_leaf_penalty = 1.0;
  int n_histogram_bins = 255;
  double subsample_fraction = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const GbdtParams&) const = default;
};

// One node of a binary tree. Leaves have feature == -1. Rows with
// value <= threshold go left; NaN follows the default direction.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> row) const;
  bool operator==(const Tree&) const = default;
};

struct GbdtModel {
  std::string schema_hash;
  std::vector<std::string> feature_names;
  GbdtParams params;
  double training_prevalence = 0.5;
  // Log-odds of the training prevalence.
  double base_score = 0.0;
  std::vector<Tree> trees;

  double PredictMargin(std::span<const double> row) const;
  bool operator==(const GbdtModel&) const = default;
};

double Sigmoid(double margin);
// Binary logistic loss in terms of the raw margin, numerically stable.
double LogisticLoss(double margin, double label);
// First and second derivative of LogisticLoss with respect to the margin.
double LogisticGradient(double margin, double label);
double LogisticHessian(double margin);

struct TrainingTrace {
  // Mean training loss after each boosting round (index 0 = base score).
  std::vector<double> loss;
};

// Second-order gradient boosting with histogram split search and
// level-wise growth. The result is bit-identical for every num_threads.
// Throws Error(kInvalidArgument) for a single-class target, too few rows,
// or a non-finite feature (message names row and column).
GbdtModel TrainGbdt(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                    const GbdtParams& params, int num_threads = 1,
                    TrainingTrace* trace = nullptr);

// Throws Error(kSchemaMismatch) when x was built with another schema.
std::vector<double> PredictProba(const GbdtModel& model,
                                 const FeatureMatrix& x);
double PredictProbaRow(const GbdtModel& model, std::span<const double> row);

// Total split gain attributed to each feature, aligned with
// model.feature_names.
std::vector<double> SplitGainImportance(const GbdtModel& model);

// Versioned text dump; doubles use shortest round-trip representation so
// Parse(Serialize(m)) == m and Serialize(Parse(s)) == s.
std::string SerializeGbdt(const GbdtModel& model);
GbdtModel ParseGbdt(std::string_view text);
void SaveGbdt(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel LoadGbdt(const std::filesystem::path& path);

}  // namespace prtriage

#endif  // PRTRIAGE_GBDT_H_
