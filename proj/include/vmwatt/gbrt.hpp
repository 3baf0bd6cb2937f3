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

// Gradient boosted regression trees with squared-error loss.
//
// Trees are CART regressors grown with an exact greedy split search: every
// midpoint between consecutive distinct feature values of a node is a
// candidate and the candidate with the largest SSE reduction wins. Ties go
// to the lowest feature index, then the lowest threshold. Samples with
// x[feature] <= threshold descend left.
//
// An ensemble predicts baseline + learning_rate * sum_m tree_m(x), where the
// baseline is the training target mean and tree m was fit to the residuals
// left by trees 0..m-1.

#ifndef VMWATT_GBRT_HPP_
#define VMWATT_GBRT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vmwatt/dataset.hpp"
#include "vmwatt/types.hpp"

namespace vmwatt {

inline constexpr int kModelFormatVersion = 1;

struct TreeParams {
  int max_depth = 3;
  std::size_t min_samples_leaf = 1;
};

struct TreeNode {
  static constexpr std::int32_t kNoChild = -1;

  bool is_leaf() const { return left == kNoChild; }

  // Internal nodes.
  std::size_t feature_index = 0;
  double threshold = 0;
  std::int32_t left = kNoChild;
  std::int32_t right = kNoChild;
  double impurity_decrease = 0;  // parent SSE minus children SSE, >= 0

  // Leaves.
  double value = 0;

  std::size_t n_samples = 0;

  bool operator==(const TreeNode&) const = default;
};

// Flat node array, root at index 0.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  static RegressionTree leaf(double value, std::size_t n_samples);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  std::size_t depth() const;

  double predict(const FeatureVector& x) const {
    return nodes_[leaf_index(x)].value;
  }
  std::size_t leaf_index(const FeatureVector& x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const auto& n = nodes_[i];
      i = static_cast<std::size_t>(x[n.feature_index] <= n.threshold ? n.left
                                                                     : n.right);
    }
    return i;
  }

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

RegressionTree fit_tree(std::span<const FeatureVector> features,
                        std::span<const double> targets,
                        const TreeParams& params, std::uint64_t seed = 0);

double tree_predict(const RegressionTree& tree, const FeatureVector& x);

struct GbrHyperparameters {
  int n_trees = 200;
  double learning_rate = 0.1;
  int max_depth = 3;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;  // recorded; fitting is currently deterministic

  void validate() const;
  bool operator==(const GbrHyperparameters&) const = default;
};

struct GbrModel {
  std::vector<std::string> feature_names = default_feature_names();
  double baseline = 0;
  double learning_rate = 0.1;
  GbrHyperparameters hyperparameters;
  std::vector<RegressionTree> trees;

  double predict(const FeatureVector& x) const;
  // Checked entry point for vectors of unknown length.
  double predict(std::span<const double> x) const;
  std::vector<double> predict_batch(std::span<const FeatureVector> rows) const;

  bool operator==(const GbrModel&) const = default;
};

// Training-set MSE before any tree (index 0) and after each round.
struct FitTrace {
  std::vector<double> training_mse;
};

GbrModel fit_gbr(std::span<const FeatureVector> features,
                 std::span<const double> targets,
                 const GbrHyperparameters& hyperparameters,
                 std::vector<std::string> feature_names = default_feature_names(),
                 FitTrace* trace = nullptr);
GbrModel fit_gbr(const TrainingDataset& dataset,
                 const GbrHyperparameters& hyperparameters,
                 FitTrace* trace = nullptr);

double gbr_predict(const GbrModel& model, std::span<const double> x);

struct FeatureImportances {
  std::array<double, kFeatureCount> percentages{};
  bool no_splits = false;  // every tree is a single leaf; all zeros
};

// Mean decrease in impurity: per-feature sum of impurity_decrease over all
// internal nodes of all trees, normalized to percent.
FeatureImportances mdi_importances(const GbrModel& model);

std::string model_to_json(const GbrModel& model);
GbrModel model_from_json(const std::string& text,
                         const std::string& source_name = "model");
void save_model(const GbrModel& model, const std::filesystem::path& path);
GbrModel load_model(const std::filesystem::path& path);

}  // namespace vmwatt

#endif  // VMWATT_GBRT_HPP_
