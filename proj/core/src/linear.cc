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

#include "prtriage/linear.h"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "prtriage/errors.h"
#include "prtriage/gbdt.h"

namespace prtriage {

double LinearModel::Margin(std::span<const double> row) const {
  double m = intercept;
  for (size_t i = 0; i < weights.size(); ++i) m += weights[i] * row[i];
  return m;
}

double LinearModel::Predict(std::span<const double> row) const {
  return Sigmoid(Margin(row));
}

namespace {

double PenalizedLoss(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double l2) {
  const Eigen::VectorXd margin = design * beta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    loss += LogisticLoss(margin[i], y[i]);
  }
  return loss + 0.5 * l2 * beta.tail(beta.size() - 1).squaredNorm();
}

}  // namespace

LinearModel TrainLogisticRegression(std::span<const double> x, std::size_t cols,
                                    std::span<const std::uint8_t> y,
                                    const LogisticOptions& options,
                                    std::vector<std::string> names) {
  const size_t n = y.size();
  if (x.size() != n * cols) {
    ThrowInvalidArgument(fmt::format("design has {} values, expected {}x{}",
                                     x.size(), n, cols));
  }
  const size_t pos = static_cast<size_t>(
      std::count_if(y.begin(), y.end(), [](auto v) { return v != 0; }));
  if (pos == 0 || pos == n) {
    ThrowInvalidArgument("logistic regression needs both classes");
  }
  if (!(options.l2 >= 0.0)) ThrowInvalidArgument("l2 must be >= 0");

  // Column 0 is the intercept.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(cols + 1));
  Eigen::VectorXd target(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (size_t c = 0; c < cols; ++c) {
      const double v = x[i * cols + c];
      if (!std::isfinite(v)) {
        ThrowInvalidArgument(fmt::format("non-finite value at row {} col {}", i, c));
      }
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c + 1)) = v;
    }
    target[static_cast<Eigen::Index>(i)] = y[i] != 0 ? 1.0 : 0.0;
  }

  const Eigen::Index d = design.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  const double prevalence = static_cast<double>(pos) / static_cast<double>(n);
  beta[0] = std::log(prevalence / (1.0 - prevalence));
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d, options.l2);
  penalty[0] = 0.0;

  double loss = PenalizedLoss(design, target, beta, options.l2);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd margin = design * beta;
    Eigen::VectorXd p(margin.size());
    Eigen::VectorXd w(margin.size());
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      p[i] = Sigmoid(margin[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (p - target) + penalty.cwiseProduct(beta);
    Eigen::MatrixXd hess = design.transpose() * w.asDiagonal() * design;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);

    double scale = 1.0;
    Eigen::VectorXd candidate = beta - step;
    double candidate_loss = PenalizedLoss(design, target, candidate, options.l2);
    for (int h = 0; h < 40 && candidate_loss > loss; ++h) {
      scale *= 0.5;
      candidate = beta - scale * step;
      candidate_loss = PenalizedLoss(design, target, candidate, options.l2);
    }
    if (candidate_loss > loss) break;
    const double delta = (scale * step).cwiseAbs().maxCoeff();
    beta = std::move(candidate);
    loss = candidate_loss;
    if (delta < options.tolerance * (1.0 + beta.cwiseAbs().maxCoeff())) {
      ++iter;
      break;
    }
  }

  LinearModel model;
  model.intercept = beta[0];
  model.weights.assign(beta.data() + 1, beta.data() + d);
  if (names.empty()) {
    for (size_t c = 0; c < cols; ++c) names.push_back(fmt::format("x{}", c));
  }
  model.feature_names = std::move(names);
  model.iterations = iter;
  return model;
}

LinearModel TrainSizeOnly(std::span<const double> log_total_changes,
                          std::span<const std::uint8_t> y,
                          const LogisticOptions& options) {
  return TrainLogisticRegression(log_total_changes, 1, y, options,
                                 {"log1p_total_changes"});
}

std::vector<std::string> TokenizePath(std::string_view path) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : path) {
    if (c == '/' || c == '.' || c == '-' || c == '_') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

namespace {

std::map<std::string, int> TermCounts(const PullRequestRecord& record) {
  std::map<std::string, int> counts;
  for (const auto& f : record.files) {
    for (auto& t : TokenizePath(f.path)) ++counts[std::move(t)];
  }
  return counts;
}

}  // namespace

std::vector<double> PathTokenModel::Vectorize(
    const PullRequestRecord& record) const {
  std::vector<double> v(vocabulary.size(), 0.0);
  for (const auto& [token, count] : TermCounts(record)) {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), token);
    if (it == vocabulary.end() || *it != token) continue;
    const size_t j = static_cast<size_t>(it - vocabulary.begin());
    v[j] = count * idf[j];
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

double PathTokenModel::Predict(const PullRequestRecord& record) const {
  return linear.Predict(Vectorize(record));
}

PathTokenModel TrainPathTokenBaseline(std::span<const PullRequestRecord> records,
                                      std::span<const std::uint8_t> y,
                                      const PathTokenOptions& options) {
  if (records.size() != y.size()) {
    ThrowInvalidArgument("records and labels differ in length");
  }
  std::map<std::string, int> doc_freq;
  for (const auto& r : records) {
    for (const auto& entry : TermCounts(r)) ++doc_freq[entry.first];
  }
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& [token, df] : doc_freq) {
    if (df >= options.min_document_frequency) kept.emplace_back(token, df);
  }
  if (kept.empty()) {
    ThrowInvalidArgument(fmt::format(
        "path-token vocabulary is empty (min document frequency {})",
        options.min_document_frequency));
  }
  if (kept.size() > options.max_vocabulary) {
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    kept.resize(options.max_vocabulary);
    std::sort(kept.begin(), kept.end());
  }

  PathTokenModel model;
  const double n_docs = static_cast<double>(records.size());
  for (const auto& [token, df] : kept) {
    model.vocabulary.push_back(token);
    model.idf.push_back(std::log((1.0 + n_docs) / (1.0 + df)) + 1.0);
  }
  const size_t d = model.vocabulary.size();
  std::vector<double> x;
  x.reserve(records.size() * d);
  for (const auto& r : records) {
    const auto v = model.Vectorize(r);
    x.insert(x.end(), v.begin(), v.end());
  }
  model.linear = TrainLogisticRegression(x, d, y, options.logistic,
                                         model.vocabulary);
  return model;
}

}  // namespace prtriage
