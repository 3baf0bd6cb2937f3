/*
 * Copyright 2026 The vmwatt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vmwatt/gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vmwatt/error.hpp"

namespace vmwatt {
namespace {

// Gains within this fraction of a node's centered SSE are treated as equal;
// a split must beat zero by the same margin. Keeps rounding noise from
// deciding ties or creating splits on constant residuals.
constexpr double kRelativeGainTolerance = 1e-10;

using RowIndex = std::uint32_t;

// Row indices sorted by each feature, computed once per training set and
// shared by every boosting round.
struct SortedColumns {
  std::array<std::vector<RowIndex>, kFeatureCount> order;
};

SortedColumns presort(std::span<const FeatureVector> x) {
  SortedColumns cols;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    auto& order = cols.order[f];
    order.resize(x.size());
    std::iota(order.begin(), order.end(), RowIndex{0});
    std::stable_sort(order.begin(), order.end(), [&](RowIndex a, RowIndex b) {
      return x[a][f] < x[b][f];
    });
  }
  return cols;
}

double midpoint(double lo, double hi) {
  const double mid = (lo + hi) / 2;
  // Adjacent doubles: keep the threshold strictly below `hi`.
  return mid < hi ? mid : lo;
}

struct NodeStats {
  std::size_t count = 0;
  double sum = 0;
  double mean = 0;
  double centered_sum = 0;  // sum of (y - mean), ~0 up to rounding
  double sse = 0;           // sum of (y - mean)^2
};

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0;
  double gain = 0;
};

struct ScanState {
  std::size_t count = 0;
  double centered_sum = 0;
  double last_value = 0;
};

// Grows one tree level by level. Nodes of a level are independent, so the
// result is the same as depth-first recursion. `node_of` receives the leaf
// index of every training row.
RegressionTree grow_tree(std::span<const FeatureVector> x,
                         std::span<const double> y, const SortedColumns& cols,
                         const TreeParams& params,
                         std::vector<std::int32_t>& node_of) {
  const std::size_t n = x.size();
  const std::size_t min_leaf = std::max<std::size_t>(1, params.min_samples_leaf);

  std::vector<TreeNode> nodes(1);
  std::vector<NodeStats> stats(1);
  node_of.assign(n, 0);

  auto finish_stats = [&](std::span<const std::int32_t> level_nodes) {
    for (auto id : level_nodes) {
      auto& s = stats[id];
      s.mean = s.count ? s.sum / static_cast<double>(s.count) : 0.0;
      s.centered_sum = 0;
      s.sse = 0;
    }
    for (std::size_t r = 0; r < n; ++r) {
      auto& s = stats[node_of[r]];
      const double d = y[r] - s.mean;
      s.centered_sum += d;
      s.sse += d * d;
    }
  };

  for (std::size_t r = 0; r < n; ++r) {
    ++stats[0].count;
    stats[0].sum += y[r];
  }
  std::vector<std::int32_t> frontier{0};
  finish_stats(frontier);

  std::vector<SplitCandidate> best;
  std::vector<ScanState> scan;
  std::vector<char> splittable;

  for (int depth = 0; !frontier.empty(); ++depth) {
    best.assign(nodes.size(), {});
    scan.assign(nodes.size(), {});
    splittable.assign(nodes.size(), 0);
    bool any_splittable = false;
    if (depth < params.max_depth) {
      for (auto id : frontier) {
        if (stats[id].count >= 2 * min_leaf && stats[id].sse > 0) {
          splittable[id] = 1;
          any_splittable = true;
        }
      }
    }

    if (any_splittable) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        for (auto id : frontier) scan[id] = {};
        for (RowIndex r : cols.order[f]) {
          const auto id = node_of[r];
          if (!splittable[id]) continue;
          auto& st = scan[id];
          const double v = x[r][f];
          if (st.count > 0 && v > st.last_value) {
            const auto& ns = stats[id];
            const std::size_t n_left = st.count;
            const std::size_t n_right = ns.count - n_left;
            if (n_left >= min_leaf && n_right >= min_leaf) {
              const double s_left = st.centered_sum;
              const double s_right = ns.centered_sum - s_left;
              const double gain =
                  s_left * s_left / static_cast<double>(n_left) +
                  s_right * s_right / static_cast<double>(n_right) -
                  ns.centered_sum * ns.centered_sum /
                      static_cast<double>(ns.count);
              auto& b = best[id];
              const double tol = kRelativeGainTolerance * ns.sse;
              if (!b.found || gain > b.gain + tol) {
                b = {true, f, midpoint(st.last_value, v), gain};
              }
            }
          }
          ++st.count;
          st.centered_sum += y[r] - stats[id].mean;
          st.last_value = v;
        }
      }
    }

    std::vector<std::int32_t> next;
    for (auto id : frontier) {
      const auto& b = best[id];
      const auto& ns = stats[id];
      nodes[id].n_samples = ns.count;
      if (splittable[id] && b.found && b.gain > kRelativeGainTolerance * ns.sse) {
        const auto left = static_cast<std::int32_t>(nodes.size());
        nodes[id].feature_index = b.feature;
        nodes[id].threshold = b.threshold;
        nodes[id].left = left;
        nodes[id].right = left + 1;
        nodes[id].impurity_decrease = std::max(0.0, b.gain);
        nodes.emplace_back();
        nodes.emplace_back();
        stats.emplace_back();
        stats.emplace_back();
        next.push_back(left);
        next.push_back(left + 1);
      } else {
        nodes[id].value = ns.mean;
      }
    }
    if (next.empty()) break;

    for (std::size_t r = 0; r < n; ++r) {
      const auto& parent = nodes[node_of[r]];
      if (parent.is_leaf()) continue;
      const auto child = x[r][parent.feature_index] <= parent.threshold
                             ? parent.left
                             : parent.right;
      node_of[r] = child;
      ++stats[child].count;
      stats[child].sum += y[r];
    }
    finish_stats(next);
    frontier = std::move(next);
  }
  return RegressionTree(std::move(nodes));
}

void check_inputs(std::span<const FeatureVector> x, std::span<const double> y) {
  if (x.empty()) throw Error(ErrorKind::kData, "cannot fit on an empty dataset");
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kShape, "feature and target row counts differ");
  }
  for (std::size_t r = 0; r < x.size(); ++r) {
    bool finite = std::isfinite(y[r]);
    for (double v : x[r]) finite = finite && std::isfinite(v);
    if (!finite) {
      throw Error(ErrorKind::kData,
                  "non-finite value in row " + std::to_string(r + 1));
    }
  }
}

}  // namespace

RegressionTree::RegressionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) nodes_.emplace_back();
}

RegressionTree RegressionTree::leaf(double value, std::size_t n_samples) {
  TreeNode node;
  node.value = value;
  node.n_samples = n_samples;
  return RegressionTree({node});
}

std::size_t RegressionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

RegressionTree fit_tree(std::span<const FeatureVector> features,
                        std::span<const double> targets,
                        const TreeParams& params, std::uint64_t /*seed*/) {
  check_inputs(features, targets);
  if (params.max_depth < 0) {
    throw Error(ErrorKind::kConfig, "max_depth must be >= 0");
  }
  std::vector<std::int32_t> node_of;
  return grow_tree(features, targets, presort(features), params, node_of);
}

double tree_predict(const RegressionTree& tree, const FeatureVector& x) {
  return tree.predict(x);
}

void GbrHyperparameters::validate() const {
  if (n_trees < 1) throw Error(ErrorKind::kConfig, "n_trees must be >= 1");
  if (!(learning_rate > 0 && learning_rate <= 1)) {
    throw Error(ErrorKind::kConfig, "learning_rate must lie in (0, 1]");
  }
  if (max_depth < 0) throw Error(ErrorKind::kConfig, "max_depth must be >= 0");
  if (min_samples_leaf < 1) {
    throw Error(ErrorKind::kConfig, "min_samples_leaf must be >= 1");
  }
}

double GbrModel::predict(const FeatureVector& x) const {
  double sum = 0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return baseline + learning_rate * sum;
}

double GbrModel::predict(std::span<const double> x) const {
  if (x.size() != kFeatureCount) {
    throw Error(ErrorKind::kShape, "expected " + std::to_string(kFeatureCount) +
                                       " features, got " +
                                       std::to_string(x.size()));
  }
  FeatureVector v;
  std::copy(x.begin(), x.end(), v.begin());
  return predict(v);
}

std::vector<double> GbrModel::predict_batch(
    std::span<const FeatureVector> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(predict(row));
  return out;
}

double gbr_predict(const GbrModel& model, std::span<const double> x) {
  return model.predict(x);
}

GbrModel fit_gbr(std::span<const FeatureVector> features,
                 std::span<const double> targets,
                 const GbrHyperparameters& hyperparameters,
                 std::vector<std::string> feature_names, FitTrace* trace) {
  hyperparameters.validate();
  check_inputs(features, targets);
  if (feature_names.size() != kFeatureCount) {
    throw Error(ErrorKind::kSchema, "a model needs exactly six feature names");
  }

  const std::size_t n = features.size();
  GbrModel model;
  model.feature_names = std::move(feature_names);
  model.learning_rate = hyperparameters.learning_rate;
  model.hyperparameters = hyperparameters;
  model.baseline =
      std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);

  // Running sum of tree outputs per row; predictions are formed exactly as
  // GbrModel::predict forms them.
  std::vector<double> tree_sum(n, 0.0);
  std::vector<double> residual(n);
  auto training_mse = [&] {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e =
          targets[i] - (model.baseline + model.learning_rate * tree_sum[i]);
      acc += e * e;
    }
    return acc / static_cast<double>(n);
  };
  if (trace) {
    trace->training_mse.clear();
    trace->training_mse.push_back(training_mse());
  }

  const auto cols = presort(features);
  const TreeParams params{hyperparameters.max_depth,
                          hyperparameters.min_samples_leaf};
  std::vector<std::int32_t> node_of;
  model.trees.reserve(static_cast<std::size_t>(hyperparameters.n_trees));
  for (int m = 0; m < hyperparameters.n_trees; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] =
          targets[i] - (model.baseline + model.learning_rate * tree_sum[i]);
    }
    auto tree = grow_tree(features, residual, cols, params, node_of);
    for (std::size_t i = 0; i < n; ++i) {
      tree_sum[i] += tree.nodes()[node_of[i]].value;
    }
    model.trees.push_back(std::move(tree));
    if (trace) trace->training_mse.push_back(training_mse());
  }
  return model;
}

GbrModel fit_gbr(const TrainingDataset& dataset,
                 const GbrHyperparameters& hyperparameters, FitTrace* trace) {
  return fit_gbr(dataset.features, dataset.targets, hyperparameters,
                 dataset.feature_names, trace);
}

FeatureImportances mdi_importances(const GbrModel& model) {
  FeatureImportances result;
  std::array<double, kFeatureCount> totals{};
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes()) {
      if (!node.is_leaf()) totals[node.feature_index] += node.impurity_decrease;
    }
  }
  const double grand = std::accumulate(totals.begin(), totals.end(), 0.0);
  if (!(grand > 0)) {
    result.no_splits = true;
    return result;
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    result.percentages[f] = 100.0 * totals[f] / grand;
  }
  return result;
}

}  // namespace vmwatt
