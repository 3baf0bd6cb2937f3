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

// Brute-force reference implementations used to check the gbrt engine.
// Everything is recomputed from scratch with plain loops: each candidate
// split partitions the rows and sums squared errors directly.

#ifndef VMWATT_TESTS_ORACLES_TREE_ORACLE_HPP_
#define VMWATT_TESTS_ORACLES_TREE_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "vmwatt/gbrt.hpp"

namespace vmwatt::oracle {

// Pre-order record of a tree: internal nodes carry (feature, threshold),
// leaves carry value.
struct Step {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0;
  double value = 0;
  std::size_t n_samples = 0;
};

inline double mean_of(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
  double s = 0;
  for (auto r : rows) s += y[r];
  return s / static_cast<double>(rows.size());
}

inline double sse_of(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0;
  const double m = mean_of(y, rows);
  double s = 0;
  for (auto r : rows) s += (y[r] - m) * (y[r] - m);
  return s;
}

inline double midpoint_threshold(double lo, double hi) {
  const double mid = (lo + hi) / 2;
  return mid < hi ? mid : lo;
}

inline void grow(const std::vector<FeatureVector>& x, const std::vector<double>& y,
                 const std::vector<std::size_t>& rows, int depth, int max_depth,
                 std::size_t min_leaf, std::vector<Step>& out) {
  const double parent_sse = sse_of(y, rows);
  const double tol = 1e-10 * parent_sse;
  bool found = false;
  std::size_t best_f = 0;
  double best_t = 0;
  double best_gain = 0;
  if (depth < max_depth && rows.size() >= 2 * min_leaf && parent_sse > 0) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      std::set<double> distinct;
      for (auto r : rows) distinct.insert(x[r][f]);
      std::vector<double> values(distinct.begin(), distinct.end());
      for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const double t = midpoint_threshold(values[k], values[k + 1]);
        std::vector<std::size_t> left, right;
        for (auto r : rows) (x[r][f] <= t ? left : right).push_back(r);
        if (left.size() < min_leaf || right.size() < min_leaf) continue;
        const double gain = parent_sse - sse_of(y, left) - sse_of(y, right);
        if (!found || gain > best_gain + tol) {
          found = true;
          best_f = f;
          best_t = t;
          best_gain = gain;
        }
      }
    }
  }
  Step s;
  s.n_samples = rows.size();
  if (!found || !(best_gain > tol)) {
    s.value = mean_of(y, rows);
    out.push_back(s);
    return;
  }
  s.leaf = false;
  s.feature = best_f;
  s.threshold = best_t;
  out.push_back(s);
  std::vector<std::size_t> left, right;
  for (auto r : rows) (x[r][best_f] <= best_t ? left : right).push_back(r);
  grow(x, y, left, depth + 1, max_depth, min_leaf, out);
  grow(x, y, right, depth + 1, max_depth, min_leaf, out);
}

inline std::vector<Step> brute_force_tree(const std::vector<FeatureVector>& x,
                                          const std::vector<double>& y,
                                          int max_depth, std::size_t min_leaf) {
  std::vector<std::size_t> rows(x.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<Step> out;
  grow(x, y, rows, 0, max_depth, min_leaf, out);
  return out;
}

inline double predict_steps(const std::vector<Step>& steps, const FeatureVector& x) {
  // Walk the pre-order list: the right child of node i starts after the
  // whole left subtree.
  std::vector<std::size_t> subtree_end(steps.size());
  for (std::size_t i = steps.size(); i-- > 0;) {
    if (steps[i].leaf) {
      subtree_end[i] = i + 1;
    } else {
      subtree_end[i] = subtree_end[subtree_end[i + 1]];
    }
  }
  std::size_t i = 0;
  while (!steps[i].leaf) {
    i = x[steps[i].feature] <= steps[i].threshold ? i + 1 : subtree_end[i + 1];
  }
  return steps[i].value;
}

inline void flatten(const RegressionTree& tree, std::size_t i, std::vector<Step>& out) {
  const auto& node = tree.nodes()[i];
  Step s;
  s.n_samples = node.n_samples;
  if (node.is_leaf()) {
    s.value = node.value;
    out.push_back(s);
    return;
  }
  s.leaf = false;
  s.feature = node.feature_index;
  s.threshold = node.threshold;
  out.push_back(s);
  flatten(tree, static_cast<std::size_t>(node.left), out);
  flatten(tree, static_cast<std::size_t>(node.right), out);
}

inline std::vector<Step> flatten(const RegressionTree& tree) {
  std::vector<Step> out;
  flatten(tree, 0, out);
  return out;
}

// Same shape, splits and sample counts; leaf values within 1e-9 relative.
inline bool same_steps(const std::vector<Step>& a, const std::vector<Step>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].leaf != b[i].leaf || a[i].n_samples != b[i].n_samples) return false;
    if (a[i].leaf) {
      if (std::abs(a[i].value - b[i].value) > 1e-9 * (1 + std::abs(a[i].value))) return false;
    } else if (a[i].feature != b[i].feature || a[i].threshold != b[i].threshold) {
      return false;
    }
  }
  return true;
}

// Naive boosting: explicit prediction vector updated round by round.
struct BoostResult {
  double baseline = 0;
  std::vector<std::vector<Step>> trees;
  std::vector<double> train_predictions;
};

inline BoostResult naive_boost(const std::vector<FeatureVector>& x,
                               const std::vector<double>& y, int n_trees,
                               double learning_rate, int max_depth,
                               std::size_t min_leaf) {
  BoostResult res;
  double s = 0;
  for (double v : y) s += v;
  res.baseline = s / static_cast<double>(y.size());
  res.train_predictions.assign(y.size(), res.baseline);
  std::vector<double> residual(y.size());
  for (int m = 0; m < n_trees; ++m) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - res.train_predictions[i];
    auto tree = brute_force_tree(x, residual, max_depth, min_leaf);
    for (std::size_t i = 0; i < y.size(); ++i) {
      res.train_predictions[i] += learning_rate * predict_steps(tree, x[i]);
    }
    res.trees.push_back(std::move(tree));
  }
  return res;
}

}  // namespace vmwatt::oracle

#endif  // VMWATT_TESTS_ORACLES_TREE_ORACLE_HPP_
