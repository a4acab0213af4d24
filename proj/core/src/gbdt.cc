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

#include "prtriage/gbdt.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "prtriage/errors.h"
#include "prtriage/parallel.h"
#include "prtriage/rng.h"

namespace prtriage {

void GbdtParams::Validate() const {
  if (n_trees < 1) ThrowInvalidArgument("n_trees must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    ThrowInvalidArgument("learning_rate must be in (0,1]");
  }
  if (max_depth < 1) ThrowInvalidArgument("max_depth must be >= 1");
  if (min_samples_leaf < 1) ThrowInvalidArgument("min_samples_leaf must be >= 1");
  if (!(l2_leaf_penalty >= 0.0)) ThrowInvalidArgument("l2_leaf_penalty < 0");
  if (n_histogram_bins < 2 || n_histogram_bins > 255) {
    ThrowInvalidArgument("n_histogram_bins must be in [2,255]");
  }
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    ThrowInvalidArgument("subsample_fraction must be in (0,1]");
  }
}

double Tree::Predict(std::span<const double> row) const {
  int id = 0;
  while (true) {
    const TreeNode& n = nodes[static_cast<size_t>(id)];
    if (n.is_leaf()) return n.value;
    const double x = row[static_cast<size_t>(n.feature)];
    const bool go_left = std::isnan(x) ? n.default_left : x <= n.threshold;
    id = go_left ? n.left : n.right;
  }
}

double GbdtModel::PredictMargin(std::span<const double> row) const {
  double m = base_score;
  for (const auto& t : trees) m += t.Predict(row);
  return m;
}

double Sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

double LogisticLoss(double margin, double label) {
  // log(1 + exp(m)) - y*m, written to avoid overflow.
  const double softplus =
      std::max(margin, 0.0) + std::log1p(std::exp(-std::fabs(margin)));
  return softplus - label * margin;
}

double LogisticGradient(double margin, double label) {
  return Sigmoid(margin) - label;
}

double LogisticHessian(double margin) {
  const double p = Sigmoid(margin);
  return p * (1.0 - p);
}

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kMinHessian = 1e-12;

// Per-feature cut points; bin b holds cuts[b-1] < x <= cuts[b].
std::vector<double> ComputeCuts(std::vector<double> column, int max_bins) {
  std::sort(column.begin(), column.end());
  std::vector<double> uniques;
  for (double v : column) {
    if (uniques.empty() || v != uniques.back()) uniques.push_back(v);
  }
  auto midpoint = [](double a, double b) {
    double m = a + (b - a) * 0.5;
    if (!(m < b)) m = a;
    return m;
  };
  std::vector<double> cuts;
  if (uniques.size() <= static_cast<size_t>(max_bins)) {
    for (size_t i = 0; i + 1 < uniques.size(); ++i) {
      cuts.push_back(midpoint(uniques[i], uniques[i + 1]));
    }
    return cuts;
  }
  const size_t n = column.size();
  for (int b = 1; b < max_bins; ++b) {
    const size_t rank = (static_cast<size_t>(b) * n + max_bins - 1) / max_bins;
    const double upper = column[std::max<size_t>(rank, 1) - 1];
    auto next = std::upper_bound(uniques.begin(), uniques.end(), upper);
    if (next == uniques.end()) break;
    const double cut = midpoint(upper, *next);
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  return cuts;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;  // last bin routed left
  bool default_left = true;
};

struct ActiveNode {
  int node_id;
  std::vector<std::uint32_t> rows;
  double grad_sum;
  double hess_sum;
};

double LeafWeight(double g, double h, double lambda) {
  return -g / (h + lambda);
}

double Score(double g, double h, double lambda) { return g * g / (h + lambda); }

}  // namespace

GbdtModel TrainGbdt(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                    const GbdtParams& params, int num_threads,
                    TrainingTrace* trace) {
  params.Validate();
  const size_t n = x.rows();
  const size_t f = x.cols();
  if (y.size() != n) {
    ThrowInvalidArgument(fmt::format("{} labels for {} rows", y.size(), n));
  }
  if (n < 2 * static_cast<size_t>(params.min_samples_leaf)) {
    ThrowInvalidArgument(fmt::format(
        "need at least {} rows (2*min_samples_leaf), got {}",
        2 * params.min_samples_leaf, n));
  }
  if (f == 0) ThrowInvalidArgument("feature matrix has no columns");
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < f; ++c) {
      if (!std::isfinite(x.at(r, c))) {
        ThrowInvalidArgument(fmt::format("non-finite feature at row {} ({}), "
                                         "column {} ({})",
                                         r, x.ids[r], c, x.feature_names[c]));
      }
    }
  }
  const size_t positives =
      static_cast<size_t>(std::count_if(y.begin(), y.end(), [](auto v) {
        return v != 0;
      }));
  if (positives == 0 || positives == n) {
    ThrowInvalidArgument("training labels contain a single class");
  }

  GbdtModel model;
  model.schema_hash = x.schema_hash;
  model.feature_names = x.feature_names;
  model.params = params;
  model.training_prevalence =
      static_cast<double>(positives) / static_cast<double>(n);
  model.base_score =
      std::log(model.training_prevalence / (1.0 - model.training_prevalence));

  // Column-major bins.
  std::vector<std::vector<double>> cuts(f);
  std::vector<std::uint8_t> bins(n * f);
  ParallelFor(f, num_threads, [&](size_t c) {
    cuts[c] = ComputeCuts(x.Column(c), params.n_histogram_bins);
    for (size_t r = 0; r < n; ++r) {
      const double v = x.at(r, c);
      bins[c * n + r] = static_cast<std::uint8_t>(
          std::lower_bound(cuts[c].begin(), cuts[c].end(), v) -
          cuts[c].begin());
    }
  });

  const double lambda = params.l2_leaf_penalty;
  const size_t min_leaf = static_cast<size_t>(params.min_samples_leaf);
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<double> label(n);
  for (size_t i = 0; i < n; ++i) label[i] = y[i] != 0 ? 1.0 : 0.0;

  auto mean_loss = [&](const std::vector<double>& m) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += LogisticLoss(m[i], label[i]);
    return s / static_cast<double>(n);
  };
  double current_loss = mean_loss(margin);
  if (trace) {
    trace->loss.clear();
    trace->loss.push_back(current_loss);
  }

  for (int iter = 0; iter < params.n_trees; ++iter) {
    for (size_t i = 0; i < n; ++i) {
      grad[i] = LogisticGradient(margin[i], label[i]);
      hess[i] = LogisticHessian(margin[i]);
    }

    std::vector<std::uint32_t> root_rows;
    root_rows.reserve(n);
    if (params.subsample_fraction < 1.0) {
      Rng rng(DeriveSeed(params.seed, static_cast<std::uint64_t>(iter)));
      for (size_t i = 0; i < n; ++i) {
        if (rng.Bernoulli(params.subsample_fraction)) {
          root_rows.push_back(static_cast<std::uint32_t>(i));
        }
      }
    } else {
      for (size_t i = 0; i < n; ++i) root_rows.push_back(static_cast<std::uint32_t>(i));
    }

    Tree tree;
    std::vector<ActiveNode> active;
    {
      double g = 0.0;
      double h = 0.0;
      for (auto r : root_rows) {
        g += grad[r];
        h += hess[r];
      }
      tree.nodes.emplace_back();
      active.push_back({0, std::move(root_rows), g, h});
    }

    for (int depth = 0; depth < params.max_depth && !active.empty(); ++depth) {
      // best[c][a]: best split of feature c for active node a.
      std::vector<std::vector<SplitCandidate>> best(
          f, std::vector<SplitCandidate>(active.size()));
      ParallelFor(f, num_threads, [&](size_t c) {
        const size_t nbins = cuts[c].size() + 1;
        if (nbins < 2) return;
        std::vector<double> hg(nbins);
        std::vector<double> hh(nbins);
        std::vector<std::uint32_t> hc(nbins);
        const std::uint8_t* col = bins.data() + c * n;
        for (size_t a = 0; a < active.size(); ++a) {
          const ActiveNode& node = active[a];
          if (node.rows.size() < 2 * min_leaf) continue;
          std::fill(hg.begin(), hg.end(), 0.0);
          std::fill(hh.begin(), hh.end(), 0.0);
          std::fill(hc.begin(), hc.end(), 0u);
          for (auto r : node.rows) {
            const std::uint8_t b = col[r];
            hg[b] += grad[r];
            hh[b] += hess[r];
            ++hc[b];
          }
          const double parent = Score(node.grad_sum, node.hess_sum, lambda);
          double gl = 0.0;
          double hl = 0.0;
          size_t cl = 0;
          SplitCandidate cand;
          for (size_t b = 0; b + 1 < nbins; ++b) {
            gl += hg[b];
            hl += hh[b];
            cl += hc[b];
            const size_t cr = node.rows.size() - cl;
            if (cl < min_leaf) continue;
            if (cr < min_leaf) break;
            const double gr = node.grad_sum - gl;
            const double hr = node.hess_sum - hl;
            if (hl < kMinHessian || hr < kMinHessian) continue;
            const double gain =
                0.5 * (Score(gl, hl, lambda) + Score(gr, hr, lambda) - parent);
            if (gain > cand.gain) {
              cand.gain = gain;
              cand.feature = static_cast<int>(c);
              cand.bin = static_cast<int>(b);
              cand.default_left = cl >= cr;
            }
          }
          best[c][a] = cand;
        }
      });

      std::vector<ActiveNode> next;
      for (size_t a = 0; a < active.size(); ++a) {
        SplitCandidate chosen;
        for (size_t c = 0; c < f; ++c) {
          if (best[c][a].feature >= 0 && best[c][a].gain > chosen.gain) {
            chosen = best[c][a];
          }
        }
        ActiveNode& node = active[a];
        if (chosen.feature < 0 || chosen.gain <= kMinGain) {
          TreeNode& leaf = tree.nodes[static_cast<size_t>(node.node_id)];
          leaf.value = LeafWeight(node.grad_sum, node.hess_sum, lambda) *
                       params.learning_rate;
          continue;
        }
        const size_t c = static_cast<size_t>(chosen.feature);
        const std::uint8_t* col = bins.data() + c * n;
        ActiveNode left{static_cast<int>(tree.nodes.size()), {}, 0.0, 0.0};
        ActiveNode right{static_cast<int>(tree.nodes.size() + 1), {}, 0.0, 0.0};
        for (auto r : node.rows) {
          ActiveNode& side = col[r] <= chosen.bin ? left : right;
          side.rows.push_back(r);
          side.grad_sum += grad[r];
          side.hess_sum += hess[r];
        }
        TreeNode split;
        split.feature = chosen.feature;
        split.threshold = cuts[c][static_cast<size_t>(chosen.bin)];
        split.default_left = chosen.default_left;
        split.left = left.node_id;
        split.right = right.node_id;
        split.gain = chosen.gain;
        tree.nodes[static_cast<size_t>(node.node_id)] = split;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        next.push_back(std::move(left));
        next.push_back(std::move(right));
      }
      active = std::move(next);
    }
    for (const auto& node : active) {
      tree.nodes[static_cast<size_t>(node.node_id)].value =
          LeafWeight(node.grad_sum, node.hess_sum, lambda) *
          params.learning_rate;
    }

    // Backtrack the step if the round would raise the training loss.
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = tree.Predict(x.row(i));
    std::vector<double> trial(n);
    double scale = 1.0;
    double loss = 0.0;
    for (int attempt = 0;; ++attempt) {
      for (size_t i = 0; i < n; ++i) trial[i] = margin[i] + scale * out[i];
      loss = mean_loss(trial);
      if (loss <= current_loss || attempt >= 30) break;
      scale *= 0.5;
    }
    if (loss > current_loss) {
      scale = 0.0;
      trial = margin;
      loss = current_loss;
    }
    if (scale != 1.0) {
      for (auto& node : tree.nodes) {
        if (node.is_leaf()) node.value *= scale;
      }
    }
    margin = std::move(trial);
    current_loss = loss;
    if (trace) trace->loss.push_back(current_loss);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double PredictProbaRow(const GbdtModel& model, std::span<const double> row) {
  return Sigmoid(model.PredictMargin(row));
}

std::vector<double> PredictProba(const GbdtModel& model,
                                 const FeatureMatrix& x) {
  if (x.schema_hash != model.schema_hash ||
      x.feature_names != model.feature_names) {
    throw Error(ErrorKind::kSchemaMismatch,
                fmt::format("feature schema {} does not match model schema {}",
                            x.schema_hash, model.schema_hash));
  }
  std::vector<double> out(x.rows());
  for (size_t r = 0; r < x.rows(); ++r) out[r] = PredictProbaRow(model, x.row(r));
  return out;
}

std::vector<double> SplitGainImportance(const GbdtModel& model) {
  std::vector<double> gain(model.feature_names.size(), 0.0);
  for (const auto& t : model.trees) {
    for (const auto& node : t.nodes) {
      if (!node.is_leaf()) gain[static_cast<size_t>(node.feature)] += node.gain;
    }
  }
  return gain;
}

namespace {

constexpr std::string_view kMagic = "prtriage-gbdt 1";

std::string Real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void Bad(size_t line, std::string_view why) {
  throw Error(ErrorKind::kParse,
              fmt::format("model file line {}: {}", line, why));
}

double ParseReal(std::string_view s, size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    Bad(line, fmt::format("bad number '{}'", s));
  }
  return v;
}

long long ParseInt(std::string_view s, size_t line) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    Bad(line, fmt::format("bad integer '{}'", s));
  }
  return v;
}

std::vector<std::string_view> Words(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string SerializeGbdt(const GbdtModel& m) {
  std::string out;
  out += kMagic;
  out += '\n';
  out += "schema_hash " + m.schema_hash + '\n';
  const GbdtParams& p = m.params;
  out += fmt::format(
      "params n_trees={} learning_rate={} max_depth={} min_samples_leaf={} "
      "l2_leaf_penalty={} n_histogram_bins={} subsample_fraction={} seed={}\n",
      p.n_trees, Real(p.learning_rate), p.max_depth, p.min_samples_leaf,
      Real(p.l2_leaf_penalty), p.n_histogram_bins, Real(p.subsample_fraction),
      p.seed);
  out += "training_prevalence " + Real(m.training_prevalence) + '\n';
  out += "base_score " + Real(m.base_score) + '\n';
  out += fmt::format("features {}\n", m.feature_names.size());
  for (const auto& name : m.feature_names) out += name + '\n';
  out += fmt::format("trees {}\n", m.trees.size());
  for (size_t t = 0; t < m.trees.size(); ++t) {
    const Tree& tree = m.trees[t];
    out += fmt::format("tree {} {}\n", t, tree.nodes.size());
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& node = tree.nodes[i];
      if (node.is_leaf()) {
        out += fmt::format("leaf {} {}\n", i, Real(node.value));
      } else {
        out += fmt::format(
            "split {} {} {} {} {} {} {}\n", i,
            m.feature_names[static_cast<size_t>(node.feature)],
            Real(node.threshold), node.default_left ? "left" : "right",
            node.left, node.right, Real(node.gain));
      }
    }
  }
  out += "end\n";
  return out;
}

GbdtModel ParseGbdt(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  size_t ln = 0;
  auto next = [&]() -> std::string_view {
    if (ln >= lines.size()) Bad(ln + 1, "unexpected end of file");
    return lines[ln++];
  };
  auto expect_key = [&](std::string_view key) {
    const auto w = Words(next());
    if (w.size() != 2 || w[0] != key) Bad(ln, fmt::format("expected '{}'", key));
    return w[1];
  };

  if (next() != kMagic) Bad(1, "not a prtriage gbdt model");
  GbdtModel m;
  m.schema_hash = std::string(expect_key("schema_hash"));
  {
    const auto w = Words(next());
    if (w.empty() || w[0] != "params") Bad(ln, "expected 'params'");
    for (size_t i = 1; i < w.size(); ++i) {
      const size_t eq = w[i].find('=');
      if (eq == std::string_view::npos) Bad(ln, "bad param");
      const auto key = w[i].substr(0, eq);
      const auto val = w[i].substr(eq + 1);
      GbdtParams& p = m.params;
      if (key == "n_trees") p.n_trees = static_cast<int>(ParseInt(val, ln));
      else if (key == "learning_rate") p.learning_rate = ParseReal(val, ln);
      else if (key == "max_depth") p.max_depth = static_cast<int>(ParseInt(val, ln));
      else if (key == "min_samples_leaf") p.min_samples_leaf = static_cast<int>(ParseInt(val, ln));
      else if (key == "l2_leaf_penalty") p.l2_leaf_penalty = ParseReal(val, ln);
      else if (key == "n_histogram_bins") p.n_histogram_bins = static_cast<int>(ParseInt(val, ln));
      else if (key == "subsample_fraction") p.subsample_fraction = ParseReal(val, ln);
      else if (key == "seed") p.seed = static_cast<std::uint64_t>(std::stoull(std::string(val)));
      else Bad(ln, fmt::format("unknown param '{}'", key));
    }
  }
  m.training_prevalence = ParseReal(expect_key("training_prevalence"), ln);
  m.base_score = ParseReal(expect_key("base_score"), ln);
  const auto n_features = ParseInt(expect_key("features"), ln);
  std::unordered_map<std::string, int> index;
  for (long long i = 0; i < n_features; ++i) {
    std::string name(next());
    if (name.empty() || name.find(' ') != std::string::npos) {
      Bad(ln, "bad feature name");
    }
    index.emplace(name, static_cast<int>(i));
    m.feature_names.push_back(std::move(name));
  }
  const auto n_trees = ParseInt(expect_key("trees"), ln);
  for (long long t = 0; t < n_trees; ++t) {
    const auto head = Words(next());
    if (head.size() != 3 || head[0] != "tree" || ParseInt(head[1], ln) != t) {
      Bad(ln, "expected tree header");
    }
    const auto n_nodes = ParseInt(head[2], ln);
    if (n_nodes < 1) Bad(ln, "empty tree");
    Tree tree;
    tree.nodes.resize(static_cast<size_t>(n_nodes));
    for (long long i = 0; i < n_nodes; ++i) {
      const auto w = Words(next());
      if (w.size() < 3 || ParseInt(w[1], ln) != i) Bad(ln, "bad node line");
      TreeNode& node = tree.nodes[static_cast<size_t>(i)];
      if (w[0] == "leaf" && w.size() == 3) {
        node.value = ParseReal(w[2], ln);
        if (!std::isfinite(node.value)) Bad(ln, "non-finite leaf");
      } else if (w[0] == "split" && w.size() == 8) {
        auto it = index.find(std::string(w[2]));
        if (it == index.end()) Bad(ln, fmt::format("unknown feature '{}'", w[2]));
        node.feature = it->second;
        node.threshold = ParseReal(w[3], ln);
        if (w[4] != "left" && w[4] != "right") Bad(ln, "bad default direction");
        node.default_left = w[4] == "left";
        node.left = static_cast<int>(ParseInt(w[5], ln));
        node.right = static_cast<int>(ParseInt(w[6], ln));
        node.gain = ParseReal(w[7], ln);
        if (node.left <= i || node.right <= i || node.left >= n_nodes ||
            node.right >= n_nodes) {
          Bad(ln, "child index out of range");
        }
      } else {
        Bad(ln, "bad node line");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  if (next() != "end") Bad(ln, "expected 'end'");
  return m;
}

void SaveGbdt(const GbdtModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << SerializeGbdt(model);
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

GbdtModel LoadGbdt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseGbdt(buf.str());
}

}  // namespace prtriage
